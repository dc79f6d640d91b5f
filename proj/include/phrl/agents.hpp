#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phrl/heavy.hpp"
#include "phrl/mdp.hpp"
#include "phrl/noise.hpp"
#include "phrl/privatizer.hpp"

namespace phrl {

enum class AgentKind { VI, PO };

std::string to_string(AgentKind kind);
/// Accepts "vi" and "po".
AgentKind parse_agent_kind(const std::string& name);

/// Sign of the exponent in the multiplicative-weights policy step.
/// `Ascent` moves mass toward high Q~; `Printed` uses exp(-eta Q~).
enum class UpdateSign { Ascent, Printed };

std::string to_string(UpdateSign sign);
UpdateSign parse_update_sign(const std::string& name);

/// Everything the confidence bonuses depend on.
struct BonusParams {
  PrivacyModel model = PrivacyModel::None;
  AgentKind agent = AgentKind::VI;
  std::size_t S = 1;
  std::size_t A = 1;
  std::size_t H = 1;
  std::size_t K = 1;
  double epsilon = 1.0;
  double delta = 0.1;
  HeavyTailParams heavy;
  double e1 = 0.0;
  double e3 = 0.0;
  /// Multiplies every bonus component.
  double scale = 1.0;

  double total_steps() const { return static_cast<double>(K) * static_cast<double>(H); }
};

struct VIBonus {
  double reward = 0.0;  // beta^r
  double value = 0.0;   // beta^pv
  double total() const { return reward + value; }
};

struct POBonus {
  double reward = 0.0;      // beta^r
  double transition = 0.0;  // beta^p, an l1 radius on P~
  /// beta^r + tau H beta^p.
  double composite(double tau, std::size_t H) const {
    return reward + tau * static_cast<double>(H) * transition;
  }
};

/// Evaluates the bonus formulas for one parameter set. Constants (logs and
/// powers) are hoisted out of the per-cell path; for the non-private model
/// the truncation-bias sum is tabulated once up to K.
class BonusCalculator {
 public:
  explicit BonusCalculator(BonusParams params);

  const BonusParams& params() const { return params_; }

  /// beta^r at private visit count n~ (may be negative).
  double reward(double n_tilde) const;
  VIBonus vi(double n_tilde) const;
  POBonus po(double n_tilde) const;

 private:
  double floor_count(double n_tilde) const { return std::max(1.0, n_tilde + params_.e1); }
  double nonprivate_reward(double n_tilde) const;

  BonusParams params_;
  double heavy_coeff_ = 0.0;   // 10 or 16 times u^{1/(1+v)}
  double heavy_inner_ = 0.0;   // numerator inside the v/(1+v) power
  double pv_log_ = 0.0;        // 2 ln(4SAT/delta)
  double p_root_ = 0.0;        // sqrt(4 S ln(6AT/delta))
  double np_log_ = 0.0;        // ln(2SAT/delta)
  TruncationSchedule np_schedule_;
  std::vector<double> bias_prefix_;  // sum_{i<=n} u / B_i^v
};

/// Value-iteration bonuses (beta^r, beta^pv) at private count n~.
VIBonus bonus_vi(const BonusParams& params, double n_tilde);

/// Policy-optimisation bonuses (beta^r, beta^p) at private count n~.
POBonus bonus_po(const BonusParams& params, double n_tilde);

/// Default mirror-descent step sqrt(2 ln A / (tau^2 H^2 K)).
double default_learning_rate(std::size_t A, double tau, std::size_t H, std::size_t K);

struct PlanResult {
  ValueTables values;
  Policy policy;
};

/// Optimistic backward pass: Q~ = clip(r~ + P~ V~_{h+1} + beta, +-(H-h)tau)
/// with 0-based h, V~ = max_a Q~, greedy one-hot policy (lowest index on
/// ties). `bonus` is flat by cell.
PlanResult vi_plan(const PrivateEstimates& estimates, std::span<const double> bonus, double tau);

/// Same clipped backup, but V~(s) = sum_a pi(a|s) Q~(s,a).
ValueTables po_evaluate(const PrivateEstimates& estimates, std::span<const double> bonus,
                        const Policy& policy, double tau);

/// pi'(a|s) proportional to pi(a|s) exp(+-eta Q~(s,a)), computed with the
/// row maximum subtracted.
Policy po_improve(const Policy& policy, const ValueTables& q, double eta,
                  UpdateSign sign = UpdateSign::Ascent);

struct AgentConfig {
  AgentKind kind = AgentKind::VI;
  PrivacyModel privacy = PrivacyModel::None;
  double epsilon = 1.0;
  double delta = 0.1;
  HeavyTailParams heavy;
  std::optional<double> eta;
  double bonus_scale = 1.0;
  UpdateSign sign = UpdateSign::Ascent;
};

struct EpisodeOutcome {
  Trajectory trajectory;
  /// The policy that generated the trajectory.
  Policy policy;
};

/// One learning run: the counter bank, the current policy and the value
/// tables of the latest planning pass.
class Agent {
 public:
  Agent(AgentConfig config, std::size_t S, std::size_t A, std::size_t H, std::size_t K,
        std::unique_ptr<NoiseSource> noise = std::make_unique<LaplaceNoise>());

  /// Plan (VI) or evaluate (PO), roll out, feed the privatizer, and for PO
  /// take the mirror-descent step with this episode's Q~.
  EpisodeOutcome run_episode(const MdpSpec& env, RandomStream& rng);

  const AgentConfig& config() const { return config_; }
  const ValueTables& values() const { return values_; }
  /// For PO, the policy of the next episode.
  const Policy& policy() const { return policy_; }
  const CounterBank& bank() const { return bank_; }
  const ErrorEnvelopes& envelopes() const { return envelopes_; }
  double learning_rate() const { return eta_; }
  std::size_t episode() const { return bank_.episodes(); }

  /// Bonuses of the current counts, flat by cell (VI: beta^r + beta^pv; PO:
  /// beta^r + tau H beta^p).
  void compute_bonuses(std::vector<double>& out) const;

 private:
  AgentConfig config_;
  std::size_t S_;
  std::size_t A_;
  std::size_t H_;
  std::size_t K_;
  std::unique_ptr<NoiseSource> noise_;
  CounterBank bank_;
  ErrorEnvelopes envelopes_;
  BonusCalculator bonus_;
  double eta_ = 0.0;
  Policy policy_;
  ValueTables values_;
  PrivateEstimates estimates_;
  std::vector<double> bonus_table_;
};

}  // namespace phrl
