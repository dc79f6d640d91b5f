#include <gtest/gtest.h>

#include <bit>
#include <map>

#include "phrl/tree_counter.hpp"

namespace phrl {
namespace {

// Returns 1000 * episode so each p-sum's noise is identifiable.
class TaggedNoise final : public NoiseSource {
 public:
  double laplace(double scale, std::size_t episode, const CounterId&, RandomStream&) override {
    scales[episode] = scale;
    ++calls;
    return 1000.0 * static_cast<double>(episode);
  }
  std::map<std::size_t, double> scales;
  int calls = 0;
};

TEST(TreeCounter, ZeroNoiseReleasesExactPrefixSums) {
  ZeroNoise zero;
  RandomStream rng(1);
  TreeCounter tree(100);
  double exact = 0.0;
  for (std::size_t k = 1; k <= 100; ++k) {
    const double x = 0.1 * static_cast<double>(k % 7) - 0.2;
    exact += x;
    EXPECT_NEAR(tree.append(k, x, 1.0, zero, rng), exact, 1e-12);
  }
}

TEST(TreeCounter, ReleaseIsPrefixPlusNoiseOfCoveringPsums) {
  TaggedNoise noise;
  RandomStream rng(1);
  const std::size_t K = 37;
  TreeCounter tree(K);
  double exact = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    exact += static_cast<double>(k);
    const double released = tree.append(k, static_cast<double>(k), 0.5 * k, noise, rng);
    double expected = exact;
    for (const auto& [first, last] : TreeCounter::release_spans(k)) expected += 1000.0 * last;
    EXPECT_DOUBLE_EQ(released, expected) << "k=" << k;
  }
  EXPECT_EQ(noise.calls, static_cast<int>(K));
  for (std::size_t k = 1; k <= K; ++k) EXPECT_EQ(noise.scales[k], 0.5 * k);
}

TEST(TreeCounter, ReleaseSpansAreDyadicAndCover) {
  using Span = TreeCounter::Span;
  EXPECT_EQ(TreeCounter::release_spans(6), (std::vector<Span>{{1, 4}, {5, 6}}));
  EXPECT_EQ(TreeCounter::release_spans(8), (std::vector<Span>{{1, 8}}));
  EXPECT_EQ(TreeCounter::release_spans(7), (std::vector<Span>{{1, 4}, {5, 6}, {7, 7}}));
  for (std::size_t k = 1; k < 300; ++k) {
    const auto spans = TreeCounter::release_spans(k);
    EXPECT_EQ(spans.size(), static_cast<std::size_t>(std::popcount(k)));
    std::size_t next = 1;
    for (const auto& [a, b] : spans) {
      EXPECT_EQ(a, next);
      EXPECT_TRUE(std::has_single_bit(b - a + 1));
      next = b + 1;
    }
    EXPECT_EQ(next, k + 1);
  }
}

TEST(TreeCounter, LastClosedSpanFollowsTrailingZeros) {
  ZeroNoise zero;
  RandomStream rng(1);
  TreeCounter tree(16);
  EXPECT_EQ(tree.last_closed_span(), TreeCounter::Span(0, 0));
  for (std::size_t k = 1; k <= 12; ++k) tree.append(k, 1.0, 1.0, zero, rng);
  EXPECT_EQ(tree.last_closed_span(), TreeCounter::Span(9, 12));
  EXPECT_EQ(tree.levels(), 5u);
  EXPECT_EQ(TreeCounter(15).levels(), 4u);
}

TEST(TreeCounter, RejectsOutOfOrderAndOverCapacity) {
  ZeroNoise zero;
  RandomStream rng(1);
  TreeCounter tree(2);
  EXPECT_THROW(tree.append(2, 1.0, 1.0, zero, rng), std::out_of_range);
  tree.append(1, 1.0, 1.0, zero, rng);
  EXPECT_THROW(tree.append(1, 1.0, 1.0, zero, rng), std::out_of_range);
  tree.append(2, 1.0, 1.0, zero, rng);
  EXPECT_THROW(tree.append(3, 1.0, 1.0, zero, rng), std::out_of_range);
  EXPECT_THROW(TreeCounter(0), std::invalid_argument);
}

TEST(TreeCounter, ReleaseVarianceMatchesPopcount) {
  // Each release sums popcount(k) independent Laplace(b) terms: Var = 2 b^2 popcount(k).
  LaplaceNoise noise;
  RandomStream rng(44);
  const std::size_t K = 15;
  const int trials = 20000;
  std::vector<double> sq(K + 1, 0.0);
  for (int t = 0; t < trials; ++t) {
    TreeCounter tree(K);
    for (std::size_t k = 1; k <= K; ++k) {
      const double err = tree.append(k, 1.0, 1.0, noise, rng) - static_cast<double>(k);
      sq[k] += err * err;
    }
  }
  for (std::size_t k = 1; k <= K; ++k) {
    const double var = 2.0 * std::popcount(k);
    // Laplace fourth moment 24 b^4 gives Var(X^2) = 20 b^4 per term.
    const double se = std::sqrt((20.0 * std::popcount(k) + 2.0 * var * var) / trials);
    EXPECT_NEAR(sq[k] / trials, var, 5.0 * se) << "k=" << k;
  }
}

}  // namespace
}  // namespace phrl
