#include "phrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phrl {

std::string to_string(AgentKind kind) { return kind == AgentKind::VI ? "vi" : "po"; }

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "vi") return AgentKind::VI;
  if (name == "po") return AgentKind::PO;
  throw std::invalid_argument("agent: unknown kind '" + name + "'");
}

std::string to_string(UpdateSign sign) { return sign == UpdateSign::Ascent ? "ascent" : "printed"; }

UpdateSign parse_update_sign(const std::string& name) {
  if (name == "ascent" || name == "+") return UpdateSign::Ascent;
  if (name == "printed" || name == "-") return UpdateSign::Printed;
  throw std::invalid_argument("sign: unknown value '" + name + "'");
}

BonusCalculator::BonusCalculator(BonusParams params) : params_(params) {
  const double S = static_cast<double>(params_.S);
  const double A = static_cast<double>(params_.A);
  const double H = static_cast<double>(params_.H);
  const double T = params_.total_steps();
  const double SAT = S * A * T;
  const double v = params_.heavy.v;
  const double u = params_.heavy.u;
  const double eps = params_.epsilon;
  const double delta = params_.delta;

  pv_log_ = 2.0 * std::log(4.0 * SAT / delta);
  p_root_ = std::sqrt(4.0 * S * std::log(6.0 * A * T / delta));
  np_log_ = std::log(2.0 * SAT / delta);

  const double u_root = std::pow(u, 1.0 / (1.0 + v));
  switch (params_.model) {
    case PrivacyModel::None: {
      np_schedule_.regime = Regime::NonPrivate;
      np_schedule_.params = params_.heavy;
      np_schedule_.epsilon = eps;
      np_schedule_.delta = delta;
      np_schedule_.S = params_.S;
      np_schedule_.A = params_.A;
      np_schedule_.H = params_.H;
      np_schedule_.K = params_.K;
      bias_prefix_.assign(params_.K + 1, 0.0);
      for (std::size_t i = 1; i <= params_.K; ++i) {
        const double B = truncation_threshold(np_schedule_, i);
        bias_prefix_[i] = bias_prefix_[i - 1] + (B > 0.0 ? u / std::pow(B, v) : 0.0);
      }
      break;
    }
    case PrivacyModel::JDP:
      heavy_coeff_ = 10.0 * u_root;
      heavy_inner_ =
          H * std::pow(log_horizon(params_.K), 1.5) * std::log(3.0 * SAT / delta) / eps;
      break;
    case PrivacyModel::LDP:
      heavy_coeff_ = 16.0 * u_root;
      heavy_inner_ = H * std::log(6.0 * SAT / delta) / eps;
      break;
  }
}

double BonusCalculator::nonprivate_reward(double n_tilde) const {
  const double d = std::max(1.0, n_tilde);
  const auto n = static_cast<std::size_t>(
      std::min(d, static_cast<double>(bias_prefix_.size() - 1)));
  const double v = params_.heavy.v;
  const double u = params_.heavy.u;
  const double B = truncation_threshold(np_schedule_, n);
  const double spread = std::sqrt(2.0 * u * std::pow(B, 1.0 - v) * np_log_ / d);
  const double range = B * np_log_ / (3.0 * d);
  const double bias = bias_prefix_[n] / d;
  return spread + range + bias;
}

double BonusCalculator::reward(double n_tilde) const {
  if (params_.model == PrivacyModel::None) return params_.scale * nonprivate_reward(n_tilde);
  const double d = floor_count(n_tilde);
  const double v = params_.heavy.v;
  const double first = 2.0 * params_.heavy.tau * params_.e1 / d;
  const double denom = params_.model == PrivacyModel::JDP ? d : std::sqrt(d);
  const double second = heavy_coeff_ == 0.0
                            ? 0.0
                            : heavy_coeff_ * std::pow(heavy_inner_ / denom, v / (1.0 + v));
  return params_.scale * (first + second);
}

VIBonus BonusCalculator::vi(double n_tilde) const {
  const double d = floor_count(n_tilde);
  const double tH = params_.heavy.tau * static_cast<double>(params_.H);
  const double S = static_cast<double>(params_.S);
  VIBonus b;
  b.reward = reward(n_tilde);
  b.value = params_.scale * (tH * std::sqrt(pv_log_ / d) +
                             tH * (2.0 * params_.e1 + S * params_.e3) / d);
  return b;
}

POBonus BonusCalculator::po(double n_tilde) const {
  const double d = floor_count(n_tilde);
  const double S = static_cast<double>(params_.S);
  POBonus b;
  b.reward = reward(n_tilde);
  b.transition = params_.scale * (p_root_ / std::sqrt(d) + (S * params_.e3 + 2.0 * params_.e1) / d);
  return b;
}

VIBonus bonus_vi(const BonusParams& params, double n_tilde) {
  return BonusCalculator(params).vi(n_tilde);
}

POBonus bonus_po(const BonusParams& params, double n_tilde) {
  return BonusCalculator(params).po(n_tilde);
}

double default_learning_rate(std::size_t A, double tau, std::size_t H, std::size_t K) {
  const double th = tau * static_cast<double>(H);
  return std::sqrt(2.0 * std::log(static_cast<double>(A)) / (th * th * static_cast<double>(K)));
}

namespace {

void check_shapes(const PrivateEstimates& est, std::span<const double> bonus) {
  const std::size_t cells = est.H * est.S * est.A;
  if (est.reward.size() != cells || est.transition.size() != cells * est.S) {
    throw std::invalid_argument("estimates: table sizes disagree with S, A, H");
  }
  if (!bonus.empty() && bonus.size() != cells) {
    throw std::invalid_argument("bonus: expected one entry per cell");
  }
}

kernels::BackupInput step_input(const PrivateEstimates& est, std::span<const double> bonus,
                                const ValueTables& out, std::size_t h, double tau) {
  const std::size_t SA = est.S * est.A;
  kernels::BackupInput in;
  in.S = est.S;
  in.A = est.A;
  in.reward = {est.reward.data() + h * SA, SA};
  in.transitions = {est.transition.data() + h * SA * est.S, SA * est.S};
  if (!bonus.empty()) in.bonus = bonus.subspan(h * SA, SA);
  in.v_next = out.v_step(h + 1);
  in.clip = static_cast<double>(est.H - h) * tau;
  return in;
}

}  // namespace

PlanResult vi_plan(const PrivateEstimates& estimates, std::span<const double> bonus, double tau) {
  check_shapes(estimates, bonus);
  const std::size_t S = estimates.S;
  const std::size_t A = estimates.A;
  const std::size_t H = estimates.H;
  ValueTables values(S, A, H);
  std::vector<std::size_t> actions(H * S, 0);
  for (std::size_t h = H; h-- > 0;) {
    const auto in = step_input(estimates, bonus, values, h, tau);
    kernels::backup(Execution::Auto, in, values.q_step(h), values.v_step(h),
                    {actions.data() + h * S, S});
  }
  Policy greedy = Policy::deterministic(S, A, H, actions);
  return {std::move(values), std::move(greedy)};
}

ValueTables po_evaluate(const PrivateEstimates& estimates, std::span<const double> bonus,
                        const Policy& policy, double tau) {
  check_shapes(estimates, bonus);
  if (policy.num_states() != estimates.S || policy.num_actions() != estimates.A ||
      policy.horizon() != estimates.H) {
    throw std::invalid_argument("policy: shape differs from the estimates");
  }
  ValueTables values(estimates.S, estimates.A, estimates.H);
  for (std::size_t h = estimates.H; h-- > 0;) {
    auto in = step_input(estimates, bonus, values, h, tau);
    in.policy = policy.step(h);
    kernels::backup(Execution::Auto, in, values.q_step(h), values.v_step(h));
  }
  return values;
}

Policy po_improve(const Policy& policy, const ValueTables& q, double eta, UpdateSign sign) {
  const std::size_t S = policy.num_states();
  const std::size_t A = policy.num_actions();
  const std::size_t H = policy.horizon();
  if (q.S != S || q.A != A || q.H != H) {
    throw std::invalid_argument("po_improve: Q table shape differs from the policy");
  }
  const double step = sign == UpdateSign::Ascent ? eta : -eta;
  Policy next = policy;
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t s = 0; s < S; ++s) {
      auto row = next.row(h, s);
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        if (row[a] > 0.0) top = std::max(top, step * q.q(h, s, a));
      }
      double total = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        row[a] = row[a] > 0.0 ? row[a] * std::exp(step * q.q(h, s, a) - top) : 0.0;
        total += row[a];
      }
      for (std::size_t a = 0; a < A; ++a) row[a] /= total;
    }
  }
  return next;
}

namespace {

PrivacyConfig privacy_config(const AgentConfig& c, std::size_t S, std::size_t A, std::size_t H,
                             std::size_t K) {
  PrivacyConfig p;
  p.model = c.privacy;
  p.epsilon = c.epsilon;
  p.delta = c.delta;
  p.S = S;
  p.A = A;
  p.H = H;
  p.K = K;
  p.heavy = c.heavy;
  return p;
}

BonusParams bonus_params(const AgentConfig& c, std::size_t S, std::size_t A, std::size_t H,
                         std::size_t K, const ErrorEnvelopes& env) {
  BonusParams b;
  b.model = c.privacy;
  b.agent = c.kind;
  b.S = S;
  b.A = A;
  b.H = H;
  b.K = K;
  b.epsilon = c.epsilon;
  b.delta = c.delta;
  b.heavy = c.heavy;
  b.e1 = env.e1();
  b.e3 = env.e3();
  b.scale = c.bonus_scale;
  return b;
}

}  // namespace

Agent::Agent(AgentConfig config, std::size_t S, std::size_t A, std::size_t H, std::size_t K,
             std::unique_ptr<NoiseSource> noise)
    : config_(config),
      S_(S),
      A_(A),
      H_(H),
      K_(K),
      noise_(std::move(noise)),
      bank_(privacy_config(config, S, A, H, K)),
      envelopes_(bank_.config(), bank_.schedule()),
      bonus_(bonus_params(config, S, A, H, K, envelopes_)),
      policy_(Policy::uniform(S, A, H)),
      values_(S, A, H) {
  if (!noise_) throw std::invalid_argument("agent: noise source is null");
  if (!(config_.bonus_scale >= 0.0) || !std::isfinite(config_.bonus_scale)) {
    throw std::invalid_argument("bonus_scale: must be finite and non-negative");
  }
  eta_ = config_.eta.value_or(default_learning_rate(A, config_.heavy.tau, H, K));
  if (!(eta_ >= 0.0) || !std::isfinite(eta_)) {
    throw std::invalid_argument("eta: must be finite and non-negative");
  }
}

void Agent::compute_bonuses(std::vector<double>& out) const {
  const auto n = bank_.visits();
  out.resize(n.size());
  if (config_.kind == AgentKind::VI) {
    for (std::size_t c = 0; c < n.size(); ++c) out[c] = bonus_.vi(n[c]).total();
  } else {
    for (std::size_t c = 0; c < n.size(); ++c) {
      out[c] = bonus_.po(n[c]).composite(config_.heavy.tau, H_);
    }
  }
}

EpisodeOutcome Agent::run_episode(const MdpSpec& env, RandomStream& rng) {
  if (env.num_states() != S_ || env.num_actions() != A_ || env.horizon() != H_) {
    throw std::invalid_argument("agent: environment shape differs from the agent's");
  }
  if (bank_.episodes() >= K_) throw std::out_of_range("agent: all K episodes already played");

  private_estimates(bank_, envelopes_.e1(), estimates_);
  compute_bonuses(bonus_table_);
  if (config_.kind == AgentKind::VI) {
    auto plan = vi_plan(estimates_, bonus_table_, config_.heavy.tau);
    values_ = std::move(plan.values);
    policy_ = std::move(plan.policy);
  } else {
    values_ = po_evaluate(estimates_, bonus_table_, policy_, config_.heavy.tau);
  }

  EpisodeOutcome out{rollout(env, policy_, rng), policy_};
  bank_.update(out.trajectory, *noise_, rng);
  if (config_.kind == AgentKind::PO) policy_ = po_improve(policy_, values_, eta_, config_.sign);
  return out;
}

}  // namespace phrl
