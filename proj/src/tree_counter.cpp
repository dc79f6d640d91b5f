#include "phrl/tree_counter.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace phrl {

TreeCounter::TreeCounter(std::size_t capacity)
    : capacity_(capacity),
      alpha_(std::bit_width(capacity), 0.0),
      noisy_(std::bit_width(capacity), 0.0) {
  if (capacity == 0) throw std::invalid_argument("tree counter capacity: must be positive");
}

double TreeCounter::append(std::size_t k, double value, double psum_scale, NoiseSource& noise,
                           RandomStream& rng, const CounterId& id) {
  if (k != count_ + 1 || k > capacity_) {
    throw std::out_of_range("tree counter: expected item " + std::to_string(count_ + 1) +
                            " (capacity " + std::to_string(capacity_) + "), got " +
                            std::to_string(k));
  }
  const auto level = static_cast<std::size_t>(std::countr_zero(k));
  double folded = value;
  for (std::size_t j = 0; j < level; ++j) {
    folded += alpha_[j];
    alpha_[j] = 0.0;
    noisy_[j] = 0.0;
  }
  alpha_[level] = folded;
  noisy_[level] = folded + noise.laplace(psum_scale, k, id, rng);
  count_ = k;

  double sum = 0.0;
  for (std::size_t bits = k, j = 0; bits != 0; bits >>= 1, ++j) {
    if (bits & 1u) sum += noisy_[j];
  }
  released_ = sum;
  return released_;
}

TreeCounter::Span TreeCounter::last_closed_span() const {
  if (count_ == 0) return {0, 0};
  const std::size_t width = std::size_t{1} << std::countr_zero(count_);
  return {count_ - width + 1, count_};
}

std::vector<TreeCounter::Span> TreeCounter::release_spans(std::size_t k) {
  std::vector<Span> spans;
  std::size_t start = 1;
  for (int j = std::bit_width(k) - 1; j >= 0; --j) {
    if ((k >> j) & 1u) {
      const std::size_t width = std::size_t{1} << j;
      spans.emplace_back(start, start + width - 1);
      start += width;
    }
  }
  return spans;
}

}  // namespace phrl
