#include "phrl/privatizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phrl {

std::string to_string(PrivacyModel model) {
  switch (model) {
    case PrivacyModel::None:
      return "none";
    case PrivacyModel::JDP:
      return "jdp";
    case PrivacyModel::LDP:
      return "ldp";
  }
  return "?";
}

PrivacyModel parse_privacy_model(const std::string& name) {
  if (name == "none") return PrivacyModel::None;
  if (name == "jdp") return PrivacyModel::JDP;
  if (name == "ldp") return PrivacyModel::LDP;
  throw std::invalid_argument("privacy: unknown model '" + name + "'");
}

void PrivacyConfig::validate() const {
  make_schedule(*this).validate();
}

TruncationSchedule make_schedule(const PrivacyConfig& c) {
  TruncationSchedule s;
  switch (c.model) {
    case PrivacyModel::None:
      s.regime = Regime::NonPrivate;
      break;
    case PrivacyModel::JDP:
      s.regime = Regime::JDP;
      break;
    case PrivacyModel::LDP:
      s.regime = Regime::LDP;
      break;
  }
  s.params = c.heavy;
  s.epsilon = c.epsilon;
  s.delta = c.delta;
  s.S = c.S;
  s.A = c.A;
  s.H = c.H;
  s.K = c.K;
  return s;
}

ErrorEnvelopes::ErrorEnvelopes(PrivacyConfig config, TruncationSchedule schedule)
    : config_(config), schedule_(schedule) {
  const double S = static_cast<double>(config_.S);
  const double SAT = S * static_cast<double>(config_.A) * config_.total_steps();
  const double H = static_cast<double>(config_.H);
  const double eps = config_.epsilon;
  const double delta = config_.delta;
  switch (config_.model) {
    case PrivacyModel::None:
      break;
    case PrivacyModel::JDP: {
      const double depth = std::pow(log_horizon(config_.K), 1.5);
      e1_ = 3.0 * H * depth * std::log(3.0 * SAT / delta) / eps;
      e2_factor_ = 6.0 * H * depth * std::log(3.0 * SAT / delta) / eps;
      e3_ = 3.0 * H * depth * std::log(3.0 * S * SAT / delta) / eps;
      break;
    }
    case PrivacyModel::LDP: {
      const double K = static_cast<double>(config_.K);
      e1_ = 6.0 * H / eps * std::sqrt(K * std::log(6.0 * SAT / delta));
      e2_factor_ = 12.0 * H / eps * std::sqrt(std::log(6.0 * SAT / delta));
      e3_ = 6.0 * H / eps * std::sqrt(K * std::log(6.0 * S * SAT / delta));
      break;
    }
  }
}

double ErrorEnvelopes::e2(std::size_t k) const {
  switch (config_.model) {
    case PrivacyModel::None:
      return 0.0;
    case PrivacyModel::JDP:
      return e2_factor_ * truncation_threshold(schedule_, k);
    case PrivacyModel::LDP:
      return e2_factor_ * truncation_threshold(schedule_, k) * std::sqrt(static_cast<double>(k));
  }
  return 0.0;
}

ErrorEnvelopes error_envelopes(const PrivacyConfig& config, const TruncationSchedule& schedule) {
  return ErrorEnvelopes(config, schedule);
}

double central_psum_scale(const PrivacyConfig& config, const TruncationSchedule& schedule,
                          CounterKind kind, std::size_t k) {
  const double base = static_cast<double>(config.H) * log_horizon(config.K) / config.epsilon;
  if (kind == CounterKind::Reward) return 6.0 * truncation_threshold(schedule, k) * base;
  return 3.0 * base;
}

double local_entry_scale(const PrivacyConfig& config, const TruncationSchedule& schedule,
                         CounterKind kind, std::size_t j) {
  const double base = static_cast<double>(config.H) / config.epsilon;
  if (kind == CounterKind::Reward) return 6.0 * truncation_threshold(schedule, j) * base;
  return 3.0 * base;
}

CounterBank::CounterBank(PrivacyConfig config)
    : config_(config), schedule_(make_schedule(config)) {
  config_.validate();
  const std::size_t cells = config_.H * config_.S * config_.A;
  const std::size_t trans = cells * config_.S;
  visits_.assign(cells, 0.0);
  rewards_.assign(cells, 0.0);
  transitions_.assign(trans, 0.0);
  exact_visits_.assign(cells, 0.0);
  exact_rewards_.assign(cells, 0.0);
  exact_transitions_.assign(trans, 0.0);
  visit_entry_.assign(cells, 0.0);
  reward_entry_.assign(cells, 0.0);
  transition_entry_.assign(trans, 0.0);
  if (config_.model == PrivacyModel::JDP) {
    visit_trees_.assign(cells, TreeCounter(config_.K));
    reward_trees_.assign(cells, TreeCounter(config_.K));
    transition_trees_.assign(trans, TreeCounter(config_.K));
  }
}

void CounterBank::stage_entries(const Trajectory& trajectory, std::size_t episode) {
  if (episode != episodes_ + 1 || episode > config_.K) {
    throw std::out_of_range("counter bank: expected episode " + std::to_string(episodes_ + 1) +
                            " of " + std::to_string(config_.K) + ", got " +
                            std::to_string(episode));
  }
  if (trajectory.steps.size() != config_.H) {
    throw std::invalid_argument("counter bank: trajectory length differs from H");
  }
  for (std::size_t c : touched_) {
    visit_entry_[c] = 0.0;
    reward_entry_[c] = 0.0;
    std::fill_n(transition_entry_.begin() + static_cast<std::ptrdiff_t>(c * config_.S), config_.S,
                0.0);
  }
  touched_.clear();
  for (const Step& st : trajectory.steps) {
    const std::size_t c = cell(st.h, st.s, st.a);
    // Threshold indexed by the visits before this one, so B_0 = 0 drops the
    // first reward at every cell.
    const auto prior = static_cast<std::size_t>(exact_visits_[c]);
    visit_entry_[c] = 1.0;
    reward_entry_[c] = truncate_for_stream(st.r, truncation_threshold(schedule_, prior));
    transition_entry_[c * config_.S + st.s_next] = 1.0;
    touched_.push_back(c);

    exact_visits_[c] += 1.0;
    exact_rewards_[c] += reward_entry_[c];
    exact_transitions_[c * config_.S + st.s_next] += 1.0;
  }
  episodes_ = episode;
}

void CounterBank::update(const Trajectory& trajectory, NoiseSource& noise, RandomStream& rng) {
  const std::size_t k = episodes_ + 1;
  switch (config_.model) {
    case PrivacyModel::None:
      exact_bank_update(*this, trajectory, k);
      break;
    case PrivacyModel::JDP:
      central_bank_update(*this, trajectory, k, noise, rng);
      break;
    case PrivacyModel::LDP:
      local_bank_update(*this, trajectory, k, noise, rng);
      break;
  }
}

void central_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t k,
                         NoiseSource& noise, RandomStream& rng) {
  if (bank.config_.model != PrivacyModel::JDP) {
    throw std::logic_error("central_bank_update: bank is not configured for jdp");
  }
  bank.stage_entries(trajectory, k);
  const auto& cfg = bank.config_;
  const double count_scale = central_psum_scale(cfg, bank.schedule_, CounterKind::Visit, k);
  const double reward_scale = central_psum_scale(cfg, bank.schedule_, CounterKind::Reward, k);
  for (std::size_t h = 0; h < cfg.H; ++h) {
    for (std::size_t s = 0; s < cfg.S; ++s) {
      for (std::size_t a = 0; a < cfg.A; ++a) {
        const std::size_t c = bank.cell(h, s, a);
        bank.visits_[c] = bank.visit_trees_[c].append(k, bank.visit_entry_[c], count_scale, noise,
                                                      rng, {CounterKind::Visit, h, s, a, 0});
        bank.rewards_[c] = bank.reward_trees_[c].append(
            k, bank.reward_entry_[c], reward_scale, noise, rng, {CounterKind::Reward, h, s, a, 0});
        for (std::size_t sn = 0; sn < cfg.S; ++sn) {
          const std::size_t t = c * cfg.S + sn;
          bank.transitions_[t] =
              bank.transition_trees_[t].append(k, bank.transition_entry_[t], count_scale, noise,
                                               rng, {CounterKind::Transition, h, s, a, sn});
        }
      }
    }
  }
}

void local_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t j,
                       NoiseSource& noise, RandomStream& rng) {
  if (bank.config_.model != PrivacyModel::LDP) {
    throw std::logic_error("local_bank_update: bank is not configured for ldp");
  }
  bank.stage_entries(trajectory, j);
  const auto& cfg = bank.config_;
  const double count_scale = local_entry_scale(cfg, bank.schedule_, CounterKind::Visit, j);
  const double reward_scale = local_entry_scale(cfg, bank.schedule_, CounterKind::Reward, j);
  for (std::size_t h = 0; h < cfg.H; ++h) {
    for (std::size_t s = 0; s < cfg.S; ++s) {
      for (std::size_t a = 0; a < cfg.A; ++a) {
        const std::size_t c = bank.cell(h, s, a);
        bank.visits_[c] += bank.visit_entry_[c] +
                           noise.laplace(count_scale, j, {CounterKind::Visit, h, s, a, 0}, rng);
        bank.rewards_[c] += bank.reward_entry_[c] +
                            noise.laplace(reward_scale, j, {CounterKind::Reward, h, s, a, 0}, rng);
        for (std::size_t sn = 0; sn < cfg.S; ++sn) {
          const std::size_t t = c * cfg.S + sn;
          bank.transitions_[t] +=
              bank.transition_entry_[t] +
              noise.laplace(count_scale, j, {CounterKind::Transition, h, s, a, sn}, rng);
        }
      }
    }
  }
}

void exact_bank_update(CounterBank& bank, const Trajectory& trajectory, std::size_t k) {
  bank.stage_entries(trajectory, k);
  bank.visits_ = bank.exact_visits_;
  bank.rewards_ = bank.exact_rewards_;
  bank.transitions_ = bank.exact_transitions_;
}

void private_estimates(const CounterBank& bank, double e1, PrivateEstimates& out) {
  const auto& cfg = bank.config();
  out.S = cfg.S;
  out.A = cfg.A;
  out.H = cfg.H;
  const std::size_t cells = bank.num_cells();
  out.reward.resize(cells);
  out.transition.resize(cells * cfg.S);
  const auto n = bank.visits();
  const auto r = bank.reward_sums();
  const auto t = bank.transition_counts();
  for (std::size_t c = 0; c < cells; ++c) {
    const double denom = std::max(1.0, n[c] + e1);
    out.reward[c] = r[c] / denom;
    for (std::size_t sn = 0; sn < cfg.S; ++sn) {
      out.transition[c * cfg.S + sn] = t[c * cfg.S + sn] / denom;
    }
  }
}

PrivateEstimates private_estimates(const CounterBank& bank, double e1) {
  PrivateEstimates out;
  private_estimates(bank, e1, out);
  return out;
}

}  // namespace phrl
