#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phrl/heavy.hpp"
#include "phrl/kernels.hpp"
#include "phrl/random.hpp"

namespace phrl {

/// Finite-horizon tabular MDP with step-indexed kernels and reward laws.
/// Steps are 0-based in code: h = 0 .. H-1, with V at h = H identically zero.
///
/// Immutable after construction and safe to share between concurrent runs.
class MdpSpec {
 public:
  /// `transitions` is flat [((h*S + s)*A + a)*S + s'], `rewards` flat
  /// [(h*S + s)*A + a]. Throws std::invalid_argument if a row is negative or
  /// does not sum to one within 1e-12, if sizes disagree, or if a reward's
  /// mean exceeds its declared tau.
  MdpSpec(std::size_t S, std::size_t A, std::size_t H, std::vector<double> transitions,
          std::vector<RewardDist> rewards, std::vector<double> initial);

  std::size_t num_states() const { return S_; }
  std::size_t num_actions() const { return A_; }
  std::size_t horizon() const { return H_; }

  std::size_t cell(std::size_t h, std::size_t s, std::size_t a) const {
    return (h * S_ + s) * A_ + a;
  }

  std::span<const double> transition_row(std::size_t h, std::size_t s, std::size_t a) const {
    return {transitions_.data() + cell(h, s, a) * S_, S_};
  }
  /// All S*A rows of step h.
  std::span<const double> step_transitions(std::size_t h) const {
    return {transitions_.data() + h * S_ * A_ * S_, S_ * A_ * S_};
  }
  std::span<const double> step_mean_rewards(std::size_t h) const {
    return {means_.data() + h * S_ * A_, S_ * A_};
  }

  const RewardDist& reward(std::size_t h, std::size_t s, std::size_t a) const {
    return rewards_[cell(h, s, a)];
  }
  double mean_reward(std::size_t h, std::size_t s, std::size_t a) const {
    return means_[cell(h, s, a)];
  }

  std::span<const double> initial_distribution() const { return initial_; }
  std::span<const double> transitions() const { return transitions_; }
  std::span<const RewardDist> rewards() const { return rewards_; }

  /// Largest declared tau over all reward laws.
  double max_declared_tau() const;

 private:
  std::size_t S_;
  std::size_t A_;
  std::size_t H_;
  std::vector<double> transitions_;
  std::vector<RewardDist> rewards_;
  std::vector<double> means_;
  std::vector<double> initial_;
};

/// Step-indexed stochastic policy, probs flat [(h*S + s)*A + a].
class Policy {
 public:
  Policy(std::size_t S, std::size_t A, std::size_t H, std::vector<double> probs);

  static Policy uniform(std::size_t S, std::size_t A, std::size_t H);
  /// One-hot rows; `actions` flat [h*S + s].
  static Policy deterministic(std::size_t S, std::size_t A, std::size_t H,
                              std::span<const std::size_t> actions);

  std::size_t num_states() const { return S_; }
  std::size_t num_actions() const { return A_; }
  std::size_t horizon() const { return H_; }

  std::span<const double> row(std::size_t h, std::size_t s) const {
    return {probs_.data() + (h * S_ + s) * A_, A_};
  }
  std::span<double> row(std::size_t h, std::size_t s) {
    return {probs_.data() + (h * S_ + s) * A_, A_};
  }
  std::span<const double> step(std::size_t h) const {
    return {probs_.data() + h * S_ * A_, S_ * A_};
  }
  std::span<const double> probs() const { return probs_; }

  /// Throws std::invalid_argument unless every row is on the simplex within
  /// `tol`.
  void validate(double tol = 1e-12) const;

 private:
  std::size_t S_;
  std::size_t A_;
  std::size_t H_;
  std::vector<double> probs_;
};

/// V has (H+1)*S entries with the last S zero; Q has H*S*A.
struct ValueTables {
  std::size_t S = 0;
  std::size_t A = 0;
  std::size_t H = 0;
  std::vector<double> V;
  std::vector<double> Q;

  ValueTables() = default;
  ValueTables(std::size_t S_, std::size_t A_, std::size_t H_)
      : S(S_), A(A_), H(H_), V((H_ + 1) * S_, 0.0), Q(H_ * S_ * A_, 0.0) {}

  double v(std::size_t h, std::size_t s) const { return V[h * S + s]; }
  double q(std::size_t h, std::size_t s, std::size_t a) const { return Q[(h * S + s) * A + a]; }
  std::span<double> v_step(std::size_t h) { return {V.data() + h * S, S}; }
  std::span<const double> v_step(std::size_t h) const { return {V.data() + h * S, S}; }
  std::span<double> q_step(std::size_t h) { return {Q.data() + h * S * A, S * A}; }
  std::span<const double> q_step(std::size_t h) const { return {Q.data() + h * S * A, S * A}; }
};

struct Step {
  std::size_t h = 0;
  std::size_t s = 0;
  std::size_t a = 0;
  double r = 0.0;
  std::size_t s_next = 0;
};

struct Trajectory {
  std::vector<Step> steps;
};

/// Per-run regret trajectory. `cumulative` is the prefix sum of
/// `per_episode`.
struct RegretRecord {
  std::vector<double> per_episode;
  std::vector<double> cumulative;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Backward induction on the Bellman optimality equation with exact means.
ValueTables exact_optimal_values(const MdpSpec& mdp, Execution exec = Execution::Auto);

/// Greedy (lowest-index tie-break) policy for the given Q tables.
Policy greedy_policy(const ValueTables& values);

/// Bellman expectation recursion for a fixed policy.
ValueTables policy_value(const MdpSpec& mdp, const Policy& policy,
                         Execution exec = Execution::Auto);

/// One episode of exactly H steps.
Trajectory rollout(const MdpSpec& mdp, const Policy& policy, RandomStream& rng);

/// sum_s mu(s) (V*_0(s) - V^pi_0(s)), with `optimal` from exact_optimal_values.
double per_episode_regret(const MdpSpec& mdp, const Policy& policy, const ValueTables& optimal);

/// Structured-text form: {"S","A","H","transitions"[h][s][a][s'],
/// "rewards"[h][s][a]{...},"initial"[s]}.
nlohmann::json mdp_to_json(const MdpSpec& mdp);
MdpSpec mdp_from_json(const nlohmann::json& doc);

nlohmann::json reward_to_json(const RewardDist& dist);
RewardDist reward_from_json(const nlohmann::json& doc);

}  // namespace phrl
