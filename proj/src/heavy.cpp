#include "phrl/heavy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace phrl {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void HeavyTailParams::validate() const {
  if (!(v > 0.0 && v <= 1.0)) invalid("v", "must lie in (0, 1]");
  if (!(u > 0.0)) invalid("u", "must be positive");
  if (!(tau > 0.0)) invalid("tau", "must be positive");
}

RewardDist::RewardDist(Kind kind, HeavyTailParams declared)
    : kind_(std::move(kind)), declared_(declared) {
  std::visit(Overloaded{
                 [](const AlphaStable& s) {
                   if (!(s.alpha > 0.0 && s.alpha <= 2.0)) invalid("alpha", "must lie in (0, 2]");
                   if (!(std::abs(s.beta) <= 1.0)) invalid("beta", "must satisfy |beta| <= 1");
                   if (!(s.sigma > 0.0)) invalid("sigma", "must be positive");
                 },
                 [](const PointMassMixture& m) {
                   if (!(m.p >= 0.0 && m.p <= 1.0)) invalid("p", "must lie in [0, 1]");
                 },
                 [](const Constant&) {},
             },
             kind_);
}

RewardDist RewardDist::alpha_stable(double alpha, double beta, double mu, double sigma,
                                    HeavyTailParams declared) {
  return RewardDist(AlphaStable{alpha, beta, mu, sigma}, declared);
}

RewardDist RewardDist::point_mass(double p, double high_value, HeavyTailParams declared) {
  return RewardDist(PointMassMixture{p, high_value}, declared);
}

RewardDist RewardDist::constant(double value, HeavyTailParams declared) {
  return RewardDist(Constant{value}, declared);
}

double RewardDist::mean() const {
  return std::visit(Overloaded{
                        [](const AlphaStable& s) {
                          if (s.alpha <= 1.0)
                            throw std::domain_error("stable law with alpha <= 1 has no mean");
                          return s.mu;
                        },
                        [](const PointMassMixture& m) { return m.p * m.high_value; },
                        [](const Constant& c) { return c.value; },
                    },
                    kind_);
}

double RewardDist::raw_moment(double v) const {
  return std::visit(Overloaded{
                        [](const AlphaStable&) -> double {
                          throw std::domain_error("no closed-form raw moment for stable laws");
                        },
                        [v](const PointMassMixture& m) {
                          return m.p * std::pow(std::abs(m.high_value), 1.0 + v);
                        },
                        [v](const Constant& c) { return std::pow(std::abs(c.value), 1.0 + v); },
                    },
                    kind_);
}

std::string RewardDist::kind_name() const {
  return std::visit(Overloaded{
                        [](const AlphaStable&) { return std::string("alpha_stable"); },
                        [](const PointMassMixture&) { return std::string("point_mass"); },
                        [](const Constant&) { return std::string("constant"); },
                    },
                    kind_);
}

double stable_from_draws(const AlphaStable& law, double angle, double exp_draw) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  const double a = law.alpha;
  const double b = law.beta;
  if (a == 1.0) {
    const double shifted = kHalfPi + b * angle;
    const double x =
        (shifted * std::tan(angle) - b * std::log(kHalfPi * exp_draw * std::cos(angle) / shifted)) /
        kHalfPi;
    return law.sigma * x + b * law.sigma * std::log(law.sigma) / kHalfPi + law.mu;
  }
  const double t = b * std::tan(kHalfPi * a);
  const double skew_shift = std::atan(t) / a;
  const double skew_scale = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
  const double x = skew_scale * std::sin(a * (angle + skew_shift)) /
                   std::pow(std::cos(angle), 1.0 / a) *
                   std::pow(std::cos(angle - a * (angle + skew_shift)) / exp_draw, (1.0 - a) / a);
  return law.sigma * x + law.mu;
}

double sample_reward(const RewardDist& dist, RandomStream& rng) {
  return std::visit(Overloaded{
                        [&rng](const AlphaStable& s) {
                          const double angle = std::numbers::pi * (rng.uniform_open() - 0.5);
                          const double w = rng.exponential();
                          return stable_from_draws(s, angle, w);
                        },
                        [&rng](const PointMassMixture& m) {
                          return rng.uniform() < m.p ? m.high_value : 0.0;
                        },
                        [](const Constant& c) { return c.value; },
                    },
                    dist.kind());
}

double estimate_raw_moment(const RewardDist& dist, double v, std::size_t samples,
                           RandomStream& rng) {
  if (samples == 0) throw std::invalid_argument("samples: must be at least 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    acc += std::pow(std::abs(sample_reward(dist, rng)), 1.0 + v);
  }
  return acc / static_cast<double>(samples);
}

void TruncationSchedule::validate() const {
  params.validate();
  if (!(delta > 0.0 && delta <= 1.0)) invalid("delta", "must lie in (0, 1]");
  if (regime != Regime::NonPrivate && !(epsilon > 0.0)) invalid("epsilon", "must be positive");
  if (S == 0 || A == 0 || H == 0 || K == 0) invalid("S/A/H/K", "must be positive");
}

double log_horizon(std::size_t K) { return std::max(1.0, std::log(static_cast<double>(K))); }

double truncation_threshold(const TruncationSchedule& s, std::size_t n) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double sa = static_cast<double>(s.S) * static_cast<double>(s.A) * s.total_steps();
  const double h = static_cast<double>(s.H);
  const double u = s.params.u;
  double base = 0.0;
  switch (s.regime) {
    case Regime::NonPrivate:
      base = u * nn / std::log(2.0 * sa / s.delta);
      break;
    case Regime::JDP:
      base = s.epsilon * u * nn /
             (h * std::pow(log_horizon(s.K), 1.5) * std::log(3.0 * sa / s.delta));
      break;
    case Regime::LDP:
      base = u * s.epsilon * std::sqrt(nn) / (h * std::log(6.0 * sa / s.delta));
      break;
  }
  return std::pow(base, 1.0 / (1.0 + s.params.v));
}

}  // namespace phrl
