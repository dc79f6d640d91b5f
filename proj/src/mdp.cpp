#include "phrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace phrl {

namespace {

constexpr double kRowTol = 1e-12;

void check_distribution(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw std::invalid_argument(what + ": negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowTol) {
    throw std::invalid_argument(what + ": row sums to " + std::to_string(sum));
  }
}

std::string cell_name(std::size_t h, std::size_t s, std::size_t a) {
  return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

}  // namespace

MdpSpec::MdpSpec(std::size_t S, std::size_t A, std::size_t H, std::vector<double> transitions,
                 std::vector<RewardDist> rewards, std::vector<double> initial)
    : S_(S),
      A_(A),
      H_(H),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      initial_(std::move(initial)) {
  if (S_ == 0 || A_ == 0 || H_ == 0) throw std::invalid_argument("S, A and H must be positive");
  if (transitions_.size() != H_ * S_ * A_ * S_)
    throw std::invalid_argument("transitions: expected H*S*A*S entries");
  if (rewards_.size() != H_ * S_ * A_)
    throw std::invalid_argument("rewards: expected H*S*A entries");
  if (initial_.size() != S_) throw std::invalid_argument("initial: expected S entries");
  check_distribution(initial_, "initial");
  means_.resize(rewards_.size());
  for (std::size_t h = 0; h < H_; ++h) {
    for (std::size_t s = 0; s < S_; ++s) {
      for (std::size_t a = 0; a < A_; ++a) {
        check_distribution(transition_row(h, s, a), "transition " + cell_name(h, s, a));
        const RewardDist& r = rewards_[cell(h, s, a)];
        r.declared().validate();
        const double m = r.mean();
        if (std::abs(m) > r.declared().tau) {
          throw std::invalid_argument("reward " + cell_name(h, s, a) +
                                      ": |mean| exceeds declared tau");
        }
        means_[cell(h, s, a)] = m;
      }
    }
  }
}

double MdpSpec::max_declared_tau() const {
  double tau = 0.0;
  for (const auto& r : rewards_) tau = std::max(tau, r.declared().tau);
  return tau;
}

Policy::Policy(std::size_t S, std::size_t A, std::size_t H, std::vector<double> probs)
    : S_(S), A_(A), H_(H), probs_(std::move(probs)) {
  if (probs_.size() != H_ * S_ * A_) throw std::invalid_argument("policy: expected H*S*A entries");
}

Policy Policy::uniform(std::size_t S, std::size_t A, std::size_t H) {
  return Policy(S, A, H, std::vector<double>(H * S * A, 1.0 / static_cast<double>(A)));
}

Policy Policy::deterministic(std::size_t S, std::size_t A, std::size_t H,
                             std::span<const std::size_t> actions) {
  if (actions.size() != H * S) throw std::invalid_argument("policy: expected H*S actions");
  std::vector<double> probs(H * S * A, 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] >= A) throw std::invalid_argument("policy: action out of range");
    probs[i * A + actions[i]] = 1.0;
  }
  return Policy(S, A, H, std::move(probs));
}

void Policy::validate(double tol) const {
  for (std::size_t h = 0; h < H_; ++h) {
    for (std::size_t s = 0; s < S_; ++s) {
      double sum = 0.0;
      for (double p : row(h, s)) {
        if (!(p >= 0.0)) throw std::invalid_argument("policy: negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("policy: row off the simplex");
    }
  }
}

ValueTables exact_optimal_values(const MdpSpec& mdp, Execution exec) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const std::size_t H = mdp.horizon();
  ValueTables out(S, A, H);
  for (std::size_t h = H; h-- > 0;) {
    kernels::BackupInput in;
    in.S = S;
    in.A = A;
    in.reward = mdp.step_mean_rewards(h);
    in.transitions = mdp.step_transitions(h);
    in.v_next = out.v_step(h + 1);
    kernels::backup(exec, in, out.q_step(h), out.v_step(h));
  }
  return out;
}

Policy greedy_policy(const ValueTables& values) {
  std::vector<std::size_t> actions(values.H * values.S, 0);
  for (std::size_t h = 0; h < values.H; ++h) {
    for (std::size_t s = 0; s < values.S; ++s) {
      std::size_t best = 0;
      for (std::size_t a = 1; a < values.A; ++a) {
        if (values.q(h, s, a) > values.q(h, s, best)) best = a;
      }
      actions[h * values.S + s] = best;
    }
  }
  return Policy::deterministic(values.S, values.A, values.H, actions);
}

ValueTables policy_value(const MdpSpec& mdp, const Policy& policy, Execution exec) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const std::size_t H = mdp.horizon();
  if (policy.num_states() != S || policy.num_actions() != A || policy.horizon() != H) {
    throw std::invalid_argument("policy shape does not match the MDP");
  }
  ValueTables out(S, A, H);
  for (std::size_t h = H; h-- > 0;) {
    kernels::BackupInput in;
    in.S = S;
    in.A = A;
    in.reward = mdp.step_mean_rewards(h);
    in.transitions = mdp.step_transitions(h);
    in.v_next = out.v_step(h + 1);
    in.policy = policy.step(h);
    kernels::backup(exec, in, out.q_step(h), out.v_step(h));
  }
  return out;
}

Trajectory rollout(const MdpSpec& mdp, const Policy& policy, RandomStream& rng) {
  Trajectory traj;
  traj.steps.reserve(mdp.horizon());
  std::size_t s = rng.categorical(mdp.initial_distribution());
  for (std::size_t h = 0; h < mdp.horizon(); ++h) {
    const std::size_t a = rng.categorical(policy.row(h, s));
    const double r = sample_reward(mdp.reward(h, s, a), rng);
    const std::size_t next = rng.categorical(mdp.transition_row(h, s, a));
    traj.steps.push_back(Step{h, s, a, r, next});
    s = next;
  }
  return traj;
}

double per_episode_regret(const MdpSpec& mdp, const Policy& policy, const ValueTables& optimal) {
  const ValueTables pv = policy_value(mdp, policy, Execution::Serial);
  const auto mu = mdp.initial_distribution();
  double regret = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (mu[s] > 0.0) regret += mu[s] * (optimal.v(0, s) - pv.v(0, s));
  }
  return regret;
}

nlohmann::json reward_to_json(const RewardDist& dist) {
  nlohmann::json j;
  j["kind"] = dist.kind_name();
  if (const auto* s = std::get_if<AlphaStable>(&dist.kind())) {
    j["alpha"] = s->alpha;
    j["beta"] = s->beta;
    j["mu"] = s->mu;
    j["sigma"] = s->sigma;
  } else if (const auto* m = std::get_if<PointMassMixture>(&dist.kind())) {
    j["p"] = m->p;
    j["high_value"] = m->high_value;
  } else if (const auto* c = std::get_if<Constant>(&dist.kind())) {
    j["value"] = c->value;
  }
  j["v"] = dist.declared().v;
  j["u"] = dist.declared().u;
  j["tau"] = dist.declared().tau;
  return j;
}

RewardDist reward_from_json(const nlohmann::json& doc) {
  const HeavyTailParams declared{doc.at("v").get<double>(), doc.at("u").get<double>(),
                                 doc.at("tau").get<double>()};
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "alpha_stable") {
    return RewardDist::alpha_stable(doc.at("alpha").get<double>(), doc.at("beta").get<double>(),
                                    doc.at("mu").get<double>(), doc.at("sigma").get<double>(),
                                    declared);
  }
  if (kind == "point_mass") {
    return RewardDist::point_mass(doc.at("p").get<double>(), doc.at("high_value").get<double>(),
                                  declared);
  }
  if (kind == "constant") return RewardDist::constant(doc.at("value").get<double>(), declared);
  throw std::invalid_argument("reward kind: unknown '" + kind + "'");
}

nlohmann::json mdp_to_json(const MdpSpec& mdp) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const std::size_t H = mdp.horizon();
  nlohmann::json trans = nlohmann::json::array();
  nlohmann::json rewards = nlohmann::json::array();
  for (std::size_t h = 0; h < H; ++h) {
    nlohmann::json th = nlohmann::json::array();
    nlohmann::json rh = nlohmann::json::array();
    for (std::size_t s = 0; s < S; ++s) {
      nlohmann::json ts = nlohmann::json::array();
      nlohmann::json rs = nlohmann::json::array();
      for (std::size_t a = 0; a < A; ++a) {
        const auto row = mdp.transition_row(h, s, a);
        ts.push_back(std::vector<double>(row.begin(), row.end()));
        rs.push_back(reward_to_json(mdp.reward(h, s, a)));
      }
      th.push_back(std::move(ts));
      rh.push_back(std::move(rs));
    }
    trans.push_back(std::move(th));
    rewards.push_back(std::move(rh));
  }
  const auto init = mdp.initial_distribution();
  return nlohmann::json{{"S", S},
                        {"A", A},
                        {"H", H},
                        {"transitions", std::move(trans)},
                        {"rewards", std::move(rewards)},
                        {"initial", std::vector<double>(init.begin(), init.end())}};
}

MdpSpec mdp_from_json(const nlohmann::json& doc) {
  const auto S = doc.at("S").get<std::size_t>();
  const auto A = doc.at("A").get<std::size_t>();
  const auto H = doc.at("H").get<std::size_t>();
  std::vector<double> trans;
  std::vector<RewardDist> rewards;
  trans.reserve(H * S * A * S);
  rewards.reserve(H * S * A);
  const auto& t = doc.at("transitions");
  const auto& r = doc.at("rewards");
  if (t.size() != H || r.size() != H) throw std::invalid_argument("transitions/rewards: expected H blocks");
  for (std::size_t h = 0; h < H; ++h) {
    if (t[h].size() != S || r[h].size() != S)
      throw std::invalid_argument("transitions/rewards: expected S rows per step");
    for (std::size_t s = 0; s < S; ++s) {
      if (t[h][s].size() != A || r[h][s].size() != A)
        throw std::invalid_argument("transitions/rewards: expected A entries per state");
      for (std::size_t a = 0; a < A; ++a) {
        const auto row = t[h][s][a].get<std::vector<double>>();
        if (row.size() != S) throw std::invalid_argument("transitions: expected S next states");
        trans.insert(trans.end(), row.begin(), row.end());
        rewards.push_back(reward_from_json(r[h][s][a]));
      }
    }
  }
  return MdpSpec(S, A, H, std::move(trans), std::move(rewards),
                 doc.at("initial").get<std::vector<double>>());
}

}  // namespace phrl
