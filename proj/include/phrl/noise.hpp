#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "phrl/random.hpp"

namespace phrl {

/// Laplace(0, scale) value at uniform level u in (0, 1). Median at u = 1/2.
double laplace_inverse_cdf(double u, double scale);

/// Inverse-CDF Laplace draw. Requires scale > 0.
double sample_laplace(double scale, RandomStream& rng);

enum class CounterKind { Visit, Reward, Transition };

/// Identifies one private counter inside a bank. `s_next` is only meaningful
/// for transition counters.
struct CounterId {
  CounterKind kind = CounterKind::Visit;
  std::size_t h = 0;
  std::size_t s = 0;
  std::size_t a = 0;
  std::size_t s_next = 0;

  std::string to_string() const;
};

/// Pluggable noise for the privatizers. Real runs use LaplaceNoise; tests
/// swap in ZeroNoise (exact counting) or RecordingNoise (scale bookkeeping).
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual double laplace(double scale, std::size_t episode, const CounterId& id,
                         RandomStream& rng) = 0;
};

class LaplaceNoise final : public NoiseSource {
 public:
  double laplace(double scale, std::size_t, const CounterId&, RandomStream& rng) override {
    return sample_laplace(scale, rng);
  }
};

class ZeroNoise final : public NoiseSource {
 public:
  double laplace(double, std::size_t, const CounterId&, RandomStream&) override { return 0.0; }
};

struct NoiseRecord {
  std::size_t episode = 0;
  CounterId id;
  double scale = 0.0;
};

/// Records every (episode, counter, scale) request and forwards the draw to
/// an inner source (zero noise by default).
class RecordingNoise final : public NoiseSource {
 public:
  RecordingNoise() : inner_(std::make_unique<ZeroNoise>()) {}
  explicit RecordingNoise(std::unique_ptr<NoiseSource> inner) : inner_(std::move(inner)) {}

  double laplace(double scale, std::size_t episode, const CounterId& id,
                 RandomStream& rng) override {
    records_.push_back({episode, id, scale});
    return inner_->laplace(scale, episode, id, rng);
  }

  const std::vector<NoiseRecord>& records() const { return records_; }

  /// One JSON object per line: {"episode":k,"counter":"...","kind":"...",
  /// "h":..,"s":..,"a":..,"s_next":..,"scale":..}.
  void write_jsonl(std::ostream& out) const;

 private:
  std::unique_ptr<NoiseSource> inner_;
  std::vector<NoiseRecord> records_;
};

}  // namespace phrl
