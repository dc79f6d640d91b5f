#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace phrl {

/// Deterministic pseudo-random stream owned by exactly one run.
///
/// Draws are built directly from the 64-bit engine output rather than from
/// `std::*_distribution`, so a given seed produces the same sequence with any
/// standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exp(1) by inversion.
  double exponential();

  /// Index drawn from a probability vector. Entries must be non-negative;
  /// rounding slack at the end of the vector falls onto the last positive
  /// entry.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

/// Counter-based seed derivation: the stream for run `index` depends only on
/// (base, index), never on how many other runs exist or their order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace phrl
