#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "phrl/random.hpp"

namespace phrl {

/// Moment declaration for a heavy-tailed reward law: E|X|^{1+v} <= u and
/// |E X| <= tau, with v in (0, 1].
struct HeavyTailParams {
  double v = 1.0;
  double u = 1.0;
  double tau = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Stable law L(alpha, beta, mu, sigma) in the S1 parameterization. For
/// alpha = 2, beta = 0 it is Normal(mu, 2 sigma^2).
struct AlphaStable {
  double alpha = 2.0;
  double beta = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

/// Takes `high_value` with probability `p`, zero otherwise.
struct PointMassMixture {
  double p = 0.0;
  double high_value = 0.0;
};

struct Constant {
  double value = 0.0;
};

/// Reward distribution handle: a sampler plus the declared moment bounds the
/// agents are allowed to know. Exact solvers only read `mean()`.
class RewardDist {
 public:
  using Kind = std::variant<AlphaStable, PointMassMixture, Constant>;

  RewardDist() : kind_(Constant{}), declared_{} {}
  RewardDist(Kind kind, HeavyTailParams declared);

  static RewardDist alpha_stable(double alpha, double beta, double mu, double sigma,
                                 HeavyTailParams declared);
  static RewardDist point_mass(double p, double high_value, HeavyTailParams declared);
  static RewardDist constant(double value, HeavyTailParams declared);

  const Kind& kind() const { return kind_; }
  const HeavyTailParams& declared() const { return declared_; }

  /// Exact mean. Throws std::domain_error for stable laws with alpha <= 1.
  double mean() const;

  /// Exact E|X|^{1+v} where it exists in closed form (point masses and
  /// constants); throws std::domain_error otherwise.
  double raw_moment(double v) const;

  /// "alpha_stable", "point_mass" or "constant".
  std::string kind_name() const;

 private:
  Kind kind_;
  HeavyTailParams declared_;
};

double sample_reward(const RewardDist& dist, RandomStream& rng);

/// Chambers-Mallows-Stuck transform of a uniform angle in (-pi/2, pi/2) and
/// an Exp(1) variate. Exposed so tests can drive it with fixed draws.
double stable_from_draws(const AlphaStable& law, double angle, double exp_draw);

/// Monte Carlo estimate of E|X|^{1+v}.
double estimate_raw_moment(const RewardDist& dist, double v, std::size_t samples,
                           RandomStream& rng);

enum class Regime { NonPrivate, JDP, LDP };

/// Visit-indexed truncation thresholds B_n for one regime.
struct TruncationSchedule {
  Regime regime = Regime::NonPrivate;
  HeavyTailParams params;
  double epsilon = 1.0;
  double delta = 0.1;
  std::size_t S = 1;
  std::size_t A = 1;
  std::size_t H = 1;
  std::size_t K = 1;

  /// Total steps T = K H.
  double total_steps() const { return static_cast<double>(K) * static_cast<double>(H); }

  /// Throws std::invalid_argument for delta outside (0, 1], non-positive
  /// epsilon in private regimes, or invalid heavy-tail params.
  void validate() const;
};

/// ln K, floored at 1 so that K <= 2 keeps a non-degenerate tree depth.
double log_horizon(std::size_t K);

/// Closed-form B_n of the regime; B_0 = 0 and non-decreasing in n.
///   NonPrivate: (u n / ln(2SAT/delta))^{1/(1+v)}
///   JDP:        (eps u n / (H ln^{1.5}K ln(3SAT/delta)))^{1/(1+v)}
///   LDP:        (u eps sqrt(n) / (H ln(6SAT/delta)))^{1/(1+v)}
double truncation_threshold(const TruncationSchedule& schedule, std::size_t n);

/// Stream entry of a reward: r if |r| <= B, else 0.
inline double truncate_for_stream(double r, double B) { return (r <= B && r >= -B) ? r : 0.0; }

}  // namespace phrl
