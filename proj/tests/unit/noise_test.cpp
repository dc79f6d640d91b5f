#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phrl/noise.hpp"

namespace phrl {
namespace {

TEST(Laplace, InverseCdfKnownPoints) {
  EXPECT_EQ(laplace_inverse_cdf(0.5, 3.0), 0.0);
  // P(X > x) = exp(-x/b)/2, so the 0.75 quantile is b ln 2.
  EXPECT_NEAR(laplace_inverse_cdf(0.75, 2.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_inverse_cdf(0.25, 2.0), -2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_inverse_cdf(1.0 - 0.5 * std::exp(-4.0), 1.0), 4.0, 1e-12);
}

TEST(Laplace, SampleMomentsMatchScale) {
  RandomStream rng(31);
  const double b = 2.5;
  const int n = 400000;
  double sum = 0.0, abs_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace(b, rng);
    sum += x;
    abs_sum += std::abs(x);
  }
  // E|X| = b, Var|X| = b^2; Var X = 2 b^2.
  EXPECT_NEAR(sum / n, 0.0, 5.0 * b * std::sqrt(2.0 / n));
  EXPECT_NEAR(abs_sum / n, b, 5.0 * b / std::sqrt(n));
}

TEST(Laplace, RejectsNonPositiveScale) {
  RandomStream rng(1);
  EXPECT_THROW(sample_laplace(0.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_laplace(-1.0, rng), std::invalid_argument);
}

TEST(RecordingNoise, RecordsAndForwards) {
  RecordingNoise rec;
  RandomStream rng(1);
  EXPECT_EQ(rec.laplace(4.0, 3, {CounterKind::Transition, 1, 2, 0, 5}, rng), 0.0);
  EXPECT_EQ(rec.laplace(2.0, 4, {CounterKind::Visit, 0, 0, 1, 0}, rng), 0.0);
  ASSERT_EQ(rec.records().size(), 2u);
  EXPECT_EQ(rec.records()[0].episode, 3u);
  EXPECT_EQ(rec.records()[0].scale, 4.0);
  EXPECT_EQ(rec.records()[0].id.to_string(), "transition/h=1/s=2/a=0/s'=5");

  std::ostringstream out;
  rec.write_jsonl(out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j.at("kind"), "transition");
  EXPECT_EQ(j.at("s_next"), 5);
  EXPECT_EQ(j.at("scale"), 4.0);
}

TEST(RecordingNoise, WrapsLaplace) {
  RecordingNoise rec(std::make_unique<LaplaceNoise>());
  RandomStream rng(8);
  double total = 0.0;
  for (int i = 0; i < 100; ++i) total += std::abs(rec.laplace(1.0, 1, {}, rng));
  EXPECT_GT(total, 0.0);
  EXPECT_EQ(rec.records().size(), 100u);
}

}  // namespace
}  // namespace phrl
