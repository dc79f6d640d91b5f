#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "phrl/random.hpp"

namespace phrl {
namespace {

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, UniformOpenStaysInsideUnitInterval) {
  RandomStream rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, ExponentialHasUnitMean) {
  RandomStream rng(11);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  // Exp(1) has unit variance; 5 standard errors.
  EXPECT_NEAR(sum / n, 1.0, 5.0 / std::sqrt(n));
}

TEST(RandomStream, CategoricalFrequencies) {
  RandomStream rng(3);
  const std::vector<double> p{0.2, 0.0, 0.5, 0.3};
  std::vector<int> hits(p.size(), 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hits[rng.categorical(p)];
  EXPECT_EQ(hits[1], 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double se = std::sqrt(p[i] * (1 - p[i]) / n);
    EXPECT_NEAR(hits[i] / double(n), p[i], 5 * se + 1e-12);
  }
}

TEST(RandomStream, CategoricalSlackGoesToLastPositiveEntry) {
  RandomStream rng(5);
  // Sums to slightly less than one.
  const std::vector<double> p{0.5, 0.5 - 1e-15, 0.0};
  for (int i = 0; i < 10000; ++i) EXPECT_NE(rng.categorical(p), 2u);
}

TEST(DeriveSeed, DependsOnlyOnBaseAndIndex) {
  EXPECT_EQ(derive_seed(1, 5), derive_seed(1, 5));
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 4; ++base) {
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(derive_seed(base, i));
  }
  EXPECT_EQ(seen.size(), 4u * 256u);
}

}  // namespace
}  // namespace phrl
