#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phrl/heavy.hpp"
#include "phrl/mdp.hpp"
#include "phrl/noise.hpp"
#include "phrl/tree_counter.hpp"

namespace phrl {

enum class PrivacyModel { None, JDP, LDP };

std::string to_string(PrivacyModel model);
/// Accepts "none", "jdp", "ldp"; throws std::invalid_argument otherwise.
PrivacyModel parse_privacy_model(const std::string& name);

struct PrivacyConfig {
  PrivacyModel model = PrivacyModel::None;
  double epsilon = 1.0;
  double delta = 0.1;
  std::size_t S = 1;
  std::size_t A = 1;
  std::size_t H = 1;
  std::size_t K = 1;
  HeavyTailParams heavy;

  double total_steps() const { return static_cast<double>(K) * static_cast<double>(H); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Truncation schedule of the regime matching the privacy model.
TruncationSchedule make_schedule(const PrivacyConfig& config);

/// High-probability bounds on |released - exact| for visit counts (E1),
/// truncated reward sums after k items (E2(k)), and transition counts (E3).
/// All zero for the non-private model.
class ErrorEnvelopes {
 public:
  ErrorEnvelopes(PrivacyConfig config, TruncationSchedule schedule);

  double e1() const { return e1_; }
  double e2(std::size_t k) const;
  double e3() const { return e3_; }

 private:
  PrivacyConfig config_;
  TruncationSchedule schedule_;
  double e1_ = 0.0;
  double e3_ = 0.0;
  double e2_factor_ = 0.0;
};

ErrorEnvelopes error_envelopes(const PrivacyConfig& config, const TruncationSchedule& schedule);

/// Laplace scale of one p-sum in the central privatizer's counters at
/// episode k: 6 B_k H ln K / eps for reward sums, 3 H ln K / eps otherwise.
double central_psum_scale(const PrivacyConfig& config, const TruncationSchedule& schedule,
                          CounterKind kind, std::size_t k);

/// Laplace scale added to each per-episode entry by the local privatizer at
/// episode j: 6 H B_j / eps for rewards, 3 H / eps otherwise.
double local_entry_scale(const PrivacyConfig& config, const TruncationSchedule& schedule,
                         CounterKind kind, std::size_t j);

/// All private counters of one run, plus exact shadow counts kept for test
/// oracles. Cells are flat [(h*S + s)*A + a]; transitions
/// [((h*S + s)*A + a)*S + s'].
///
/// Owned by exactly one run.
class CounterBank {
 public:
  explicit CounterBank(PrivacyConfig config);

  const PrivacyConfig& config() const { return config_; }
  const TruncationSchedule& schedule() const { return schedule_; }
  /// Episodes fed so far (the released counts are those "before episode
  /// episodes()+1").
  std::size_t episodes() const { return episodes_; }

  std::size_t cell(std::size_t h, std::size_t s, std::size_t a) const {
    return (h * config_.S + s) * config_.A + a;
  }
  std::size_t num_cells() const { return visits_.size(); }

  std::span<const double> visits() const { return visits_; }
  std::span<const double> reward_sums() const { return rewards_; }
  std::span<const double> transition_counts() const { return transitions_; }

  std::span<const double> exact_visits() const { return exact_visits_; }
  std::span<const double> exact_reward_sums() const { return exact_rewards_; }
  std::span<const double> exact_transition_counts() const { return exact_transitions_; }

  /// Feeds episode episodes()+1 through the privatizer of the configured
  /// model.
  void update(const Trajectory& trajectory, NoiseSource& noise, RandomStream& rng);

 private:
  friend void central_bank_update(CounterBank&, const Trajectory&, std::size_t, NoiseSource&,
                                  RandomStream&);
  friend void local_bank_update(CounterBank&, const Trajectory&, std::size_t, NoiseSource&,
                                RandomStream&);
  friend void exact_bank_update(CounterBank&, const Trajectory&, std::size_t);

  // Stream entries of one episode; fills the scratch vectors and advances the
  // exact shadows.
  void stage_entries(const Trajectory& trajectory, std::size_t episode);

  PrivacyConfig config_;
  TruncationSchedule schedule_;
  std::size_t episodes_ = 0;

  std::vector<double> visits_;
  std::vector<double> rewards_;
  std::vector<double> transitions_;

  std::vector<double> exact_visits_;
  std::vector<double> exact_rewards_;
  std::vector<double> exact_transitions_;

  std::vector<TreeCounter> visit_trees_;
  std::vector<TreeCounter> reward_trees_;
  std::vector<TreeCounter> transition_trees_;

  std::vector<double> visit_entry_;
  std::vector<double> reward_entry_;
  std::vector<double> transition_entry_;
  std::vector<std::size_t> touched_;
};

/// Tree-mechanism privatizer. Every stream gets an entry each episode
/// (zero for cells not encountered).
void central_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t k,
                         NoiseSource& noise, RandomStream& rng);

/// Local Laplace privatizer. Every cell receives a noisy entry each episode,
/// encountered or not.
void local_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t j,
                       NoiseSource& noise, RandomStream& rng);

/// Non-private counting.
void exact_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t k);

struct PrivateEstimates {
  std::size_t S = 0;
  std::size_t A = 0;
  std::size_t H = 0;
  /// r~ = R~ / (1 v (N~ + E1)), flat by cell.
  std::vector<double> reward;
  /// P~(s'|s,a) = N~(s,a,s') / (1 v (N~(s,a) + E1)); rows are not
  /// renormalised and may be negative.
  std::vector<double> transition;
};

PrivateEstimates private_estimates(const CounterBank& bank, double e1);

/// Fills `out` in place, reusing its storage.
void private_estimates(const CounterBank& bank, double e1, PrivateEstimates& out);

}  // namespace phrl
