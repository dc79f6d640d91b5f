#include <gtest/gtest.h>

#include <cmath>

#include "phrl/privatizer.hpp"

namespace phrl {
namespace {

PrivacyConfig config(PrivacyModel model, std::size_t S, std::size_t A, std::size_t H,
                     std::size_t K, double eps = 1.0) {
  PrivacyConfig c;
  c.model = model;
  c.epsilon = eps;
  c.delta = 0.1;
  c.S = S;
  c.A = A;
  c.H = H;
  c.K = K;
  c.heavy = {1.0, 1.0, 1.0};
  return c;
}

Trajectory path(std::initializer_list<Step> steps) { return Trajectory{steps}; }

// Reference values from tests/oracles/golden.py.
TEST(ErrorEnvelopes, GoldenValuesAtUnitSizes) {
  const auto jdp = config(PrivacyModel::JDP, 1, 1, 1, 64);
  const ErrorEnvelopes ej(jdp, make_schedule(jdp));
  EXPECT_NEAR(ej.e1(), 192.35910146630932, 1e-10);
  EXPECT_NEAR(ej.e2(10), 151.93120869642655, 1e-10);
  EXPECT_NEAR(ej.e3(), 192.35910146630932, 1e-10);

  const auto ldp = config(PrivacyModel::LDP, 1, 1, 1, 64);
  const ErrorEnvelopes el(ldp, make_schedule(ldp));
  EXPECT_NEAR(el.e1(), 137.89647020652996, 1e-10);
  EXPECT_NEAR(el.e2(10), 67.48095902284189, 1e-10);
  EXPECT_NEAR(el.e3(), 137.89647020652996, 1e-10);

  const auto none = config(PrivacyModel::None, 1, 1, 1, 64);
  const ErrorEnvelopes en(none, make_schedule(none));
  EXPECT_EQ(en.e1(), 0.0);
  EXPECT_EQ(en.e2(10), 0.0);
  EXPECT_EQ(en.e3(), 0.0);
}

TEST(ErrorEnvelopes, ShrinkWithEpsilon) {
  const auto a = config(PrivacyModel::JDP, 3, 2, 4, 100, 0.5);
  const auto b = config(PrivacyModel::JDP, 3, 2, 4, 100, 1.0);
  EXPECT_GT(ErrorEnvelopes(a, make_schedule(a)).e1(), ErrorEnvelopes(b, make_schedule(b)).e1());
}

TEST(PrivacyConfig, ValidationNamesTheField) {
  auto c = config(PrivacyModel::JDP, 1, 1, 1, 4, -1.0);
  try {
    c.validate();
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("epsilon"), std::string::npos);
  }
  EXPECT_THROW(parse_privacy_model("central"), std::invalid_argument);
  EXPECT_EQ(parse_privacy_model("ldp"), PrivacyModel::LDP);
}

TEST(CounterBank, ExactCountsAndFirstRewardDropped) {
  // S = 2, A = 2, H = 2; the non-private threshold B_0 = 0 drops the first
  // reward seen at each cell.
  const auto c = config(PrivacyModel::None, 2, 2, 2, 10);
  CounterBank bank(c);
  ZeroNoise zero;
  RandomStream rng(1);
  bank.update(path({{0, 0, 1, 0.5, 1}, {1, 1, 0, 0.25, 0}}), zero, rng);
  bank.update(path({{0, 0, 1, 0.3, 0}, {1, 0, 0, 7.0, 0}}), zero, rng);
  const auto n = bank.visits();
  const auto r = bank.reward_sums();
  const auto t = bank.transition_counts();
  EXPECT_EQ(n[bank.cell(0, 0, 1)], 2.0);
  EXPECT_EQ(n[bank.cell(1, 1, 0)], 1.0);
  EXPECT_EQ(n[bank.cell(1, 0, 0)], 1.0);
  EXPECT_EQ(r[bank.cell(1, 1, 0)], 0.0);
  const double b1 = truncation_threshold(bank.schedule(), 1);
  ASSERT_GT(b1, 0.3);
  EXPECT_EQ(r[bank.cell(0, 0, 1)], 0.3);
  EXPECT_EQ(r[bank.cell(1, 0, 0)], 0.0);
  EXPECT_EQ(t[bank.cell(0, 0, 1) * 2 + 1], 1.0);
  EXPECT_EQ(t[bank.cell(0, 0, 1) * 2 + 0], 1.0);
  EXPECT_EQ(bank.episodes(), 2u);
}

TEST(CounterBank, ZeroNoisePrivateBanksMatchExactShadows) {
  for (PrivacyModel model : {PrivacyModel::JDP, PrivacyModel::LDP}) {
    const auto c = config(model, 3, 2, 3, 40);
    CounterBank bank(c);
    ZeroNoise zero;
    RandomStream rng(7);
    for (std::size_t k = 1; k <= 40; ++k) {
      Trajectory t;
      std::size_t s = rng.next_u64() % 3;
      for (std::size_t h = 0; h < 3; ++h) {
        const std::size_t a = rng.next_u64() % 2;
        const std::size_t sn = rng.next_u64() % 3;
        t.steps.push_back({h, s, a, rng.uniform() * 2.0 - 1.0, sn});
        s = sn;
      }
      bank.update(t, zero, rng);
      for (std::size_t i = 0; i < bank.num_cells(); ++i) {
        ASSERT_NEAR(bank.visits()[i], bank.exact_visits()[i], 1e-9);
        ASSERT_NEAR(bank.reward_sums()[i], bank.exact_reward_sums()[i], 1e-9);
      }
      for (std::size_t i = 0; i < bank.transition_counts().size(); ++i) {
        ASSERT_NEAR(bank.transition_counts()[i], bank.exact_transition_counts()[i], 1e-9);
      }
    }
  }
}

TEST(CounterBank, CentralNoiseEveryStreamEveryEpisodeAtStatedScales) {
  const std::size_t S = 2, A = 2, H = 3, K = 9;
  const auto c = config(PrivacyModel::JDP, S, A, H, K, 0.5);
  CounterBank bank(c);
  RecordingNoise rec;
  RandomStream rng(3);
  for (std::size_t k = 1; k <= K; ++k) {
    bank.update(path({{0, 0, 0, 0.1, 1}, {1, 1, 1, 0.2, 0}, {2, 0, 1, 0.3, 1}}), rec, rng);
  }
  const std::size_t per_episode = H * S * A * (2 + S);
  ASSERT_EQ(rec.records().size(), K * per_episode);
  const double count_scale = 3.0 * H * std::log(9.0) / 0.5;
  for (std::size_t i = 0; i < rec.records().size(); ++i) {
    const auto& r = rec.records()[i];
    const std::size_t k = i / per_episode + 1;
    ASSERT_EQ(r.episode, k);
    if (r.id.kind == CounterKind::Reward) {
      const double bk = truncation_threshold(bank.schedule(), k);
      ASSERT_NEAR(r.scale, 6.0 * bk * H * std::log(9.0) / 0.5, 1e-12);
    } else {
      ASSERT_NEAR(r.scale, count_scale, 1e-12);
    }
  }
}

TEST(CounterBank, LocalNoiseEveryCellEveryEpisodeAtStatedScales) {
  const std::size_t S = 2, A = 3, H = 2, K = 5;
  const auto c = config(PrivacyModel::LDP, S, A, H, K, 2.0);
  CounterBank bank(c);
  RecordingNoise rec;
  RandomStream rng(3);
  for (std::size_t j = 1; j <= K; ++j) bank.update(path({{0, 0, 2, 1.0, 1}, {1, 1, 0, 1.0, 0}}), rec, rng);
  const std::size_t per_episode = H * S * A * (2 + S);
  ASSERT_EQ(rec.records().size(), K * per_episode);
  for (std::size_t i = 0; i < rec.records().size(); ++i) {
    const auto& r = rec.records()[i];
    const std::size_t j = i / per_episode + 1;
    ASSERT_EQ(r.episode, j);
    const double expected = r.id.kind == CounterKind::Reward
                                ? 6.0 * H * truncation_threshold(bank.schedule(), j) / 2.0
                                : 3.0 * H / 2.0;
    ASSERT_NEAR(r.scale, expected, 1e-12);
  }
}

TEST(CounterBank, RejectsMisorderedOrMalformedEpisodes) {
  const auto c = config(PrivacyModel::JDP, 1, 1, 2, 2);
  CounterBank bank(c);
  ZeroNoise zero;
  RandomStream rng(1);
  EXPECT_THROW(bank.update(path({{0, 0, 0, 0.0, 0}}), zero, rng), std::invalid_argument);
  const auto ok = path({{0, 0, 0, 0.0, 0}, {1, 0, 0, 0.0, 0}});
  EXPECT_THROW(central_bank_update(bank, ok, 2, zero, rng), std::out_of_range);
  EXPECT_THROW(local_bank_update(bank, ok, 1, zero, rng), std::logic_error);
  bank.update(ok, zero, rng);
  bank.update(ok, zero, rng);
  EXPECT_THROW(bank.update(ok, zero, rng), std::out_of_range);
}

TEST(PrivateEstimates, DivideByShiftedFlooredCount) {
  const auto c = config(PrivacyModel::None, 2, 1, 1, 10);
  CounterBank bank(c);
  ZeroNoise zero;
  RandomStream rng(1);
  for (int i = 0; i < 4; ++i) bank.update(path({{0, 0, 0, 0.5, i % 2 == 0 ? 1u : 0u}}), zero, rng);
  const auto est = private_estimates(bank, 2.0);
  const double kept = bank.exact_reward_sums()[0];
  EXPECT_DOUBLE_EQ(est.reward[0], kept / 6.0);
  EXPECT_DOUBLE_EQ(est.transition[0], 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(est.transition[1], 2.0 / 6.0);
  // Unvisited state: denominator 1 v (0 + 2).
  EXPECT_EQ(est.reward[1], 0.0);
  const auto raw = private_estimates(bank, 0.0);
  EXPECT_DOUBLE_EQ(raw.transition[0] + raw.transition[1], 1.0);
}

}  // namespace
}  // namespace phrl
