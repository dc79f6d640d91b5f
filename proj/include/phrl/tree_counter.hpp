#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "phrl/noise.hpp"

namespace phrl {

/// Continual-release counter over a stream of known length K built from
/// dyadic partial sums ("p-sums"). Item k closes the p-sum at level
/// ctz(k), which absorbs all lower levels; that p-sum is released once with
/// Laplace noise of the scale supplied for item k. The released prefix sum is
/// the sum of the noisy p-sums at the set bits of k.
///
/// Only bit_width(K) p-sums are kept alive.
class TreeCounter {
 public:
  using Span = std::pair<std::size_t, std::size_t>;  // inclusive item range, 1-based

  explicit TreeCounter(std::size_t capacity);

  /// Appends item k (1-based, strictly in order) and returns the released
  /// prefix-sum estimate. `psum_scale` is the Laplace scale for the p-sum
  /// closed by this item. Throws std::out_of_range if k is not count()+1 or
  /// exceeds the capacity.
  double append(std::size_t k, double value, double psum_scale, NoiseSource& noise,
                RandomStream& rng, const CounterId& id = {});

  double released() const { return released_; }
  std::size_t count() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t levels() const { return alpha_.size(); }

  /// Item range of the p-sum closed by the most recent append.
  Span last_closed_span() const;

  /// Item ranges of the noisy p-sums summed into the release after item k,
  /// highest level first.
  static std::vector<Span> release_spans(std::size_t k);

 private:
  std::size_t capacity_;
  std::size_t count_ = 0;
  std::vector<double> alpha_;
  std::vector<double> noisy_;
  double released_ = 0.0;
};

}  // namespace phrl
