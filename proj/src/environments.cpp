#include "phrl/environments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phrl {

namespace {

// Declared bounds of the two-point instances: the (1+v)-th moment of every
// cell is at most 7/10 and every mean is below one.
HeavyTailParams two_point_declared(double v) { return {v, 1.0, 1.0}; }

void check_v(double v) {
  if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("v: must lie in (0, 1]");
}

}  // namespace

MdpSpec build_riverswim(const RiverSwimParams& p) {
  if (!(p.alpha > 1.0 && p.alpha <= 2.0)) {
    throw std::invalid_argument("alpha: must lie in (1, 2] so the mean exists");
  }
  if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma: must be positive");
  if (p.horizon == 0) throw std::invalid_argument("horizon: must be positive");
  p.heavy.validate();

  constexpr std::size_t S = kRiverSwimStates;
  constexpr std::size_t A = 2;
  const std::size_t H = p.horizon;

  std::vector<double> step(S * A * S, 0.0);
  auto at = [&](std::size_t s, std::size_t a, std::size_t sn) -> double& {
    return step[(s * A + a) * S + sn];
  };
  for (std::size_t s = 0; s < S; ++s) at(s, kRiverSwimLeft, s == 0 ? 0 : s - 1) = 1.0;
  at(0, kRiverSwimRight, 1) = p.start_advance;
  at(0, kRiverSwimRight, 0) = p.start_stay;
  for (std::size_t s = 1; s + 1 < S; ++s) {
    at(s, kRiverSwimRight, s + 1) = p.mid_advance;
    at(s, kRiverSwimRight, s) = p.mid_stay;
    at(s, kRiverSwimRight, s - 1) = p.mid_retreat;
  }
  at(S - 1, kRiverSwimRight, S - 1) = p.end_stay;
  at(S - 1, kRiverSwimRight, S - 2) = p.end_retreat;

  std::vector<RewardDist> step_rewards(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      double mu = 0.0;
      if (s == 0 && a == kRiverSwimLeft) mu = 0.005;
      if (s == S - 1 && a == kRiverSwimRight) mu = 1.0;
      step_rewards[s * A + a] = RewardDist::alpha_stable(p.alpha, 0.0, mu, p.sigma, p.heavy);
    }
  }

  std::vector<double> transitions;
  std::vector<RewardDist> rewards;
  transitions.reserve(H * step.size());
  rewards.reserve(H * step_rewards.size());
  for (std::size_t h = 0; h < H; ++h) {
    transitions.insert(transitions.end(), step.begin(), step.end());
    rewards.insert(rewards.end(), step_rewards.begin(), step_rewards.end());
  }
  std::vector<double> initial(S, 0.0);
  initial[0] = 1.0;
  return MdpSpec(S, A, H, std::move(transitions), std::move(rewards), std::move(initial));
}

MdpSpec build_jdp_hard(const JdpHardParams& p) {
  check_v(p.v);
  if (p.n == 0) throw std::invalid_argument("n: must be at least 1");
  if (p.m == 0) throw std::invalid_argument("m: must be at least 1");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("gamma: must be positive");
  const double g = std::pow(p.gamma, 1.0 + p.v);
  if (0.7 * g > 1.0) throw std::invalid_argument("gamma: 7/10 gamma^{1+v} exceeds 1");
  if (!p.optimal.empty() && p.optimal.size() != p.n) {
    throw std::invalid_argument("optimal: expected one action per initial state");
  }

  const std::size_t S = p.n + 2;
  const std::size_t A = p.m;
  const std::size_t H = 2;
  const std::size_t plus = p.n;
  const std::size_t minus = p.n + 1;
  const HeavyTailParams declared = two_point_declared(p.v);

  std::vector<double> step(S * A * S, 0.0);
  std::vector<RewardDist> step_rewards(S * A, RewardDist::constant(0.0, declared));
  for (std::size_t s = 0; s < p.n; ++s) {
    const std::size_t best = p.optimal.empty() ? 0 : p.optimal[s];
    if (best >= A) throw std::invalid_argument("optimal: action index out of range");
    for (std::size_t a = 0; a < A; ++a) {
      double prob = 0.3 * g;
      if (a == 0) prob = 0.5 * g;
      if (best != 0 && a == best) prob = 0.7 * g;
      step[(s * A + a) * S + plus] = prob;
      step[(s * A + a) * S + minus] = 1.0 - prob;
      step_rewards[s * A + a] = RewardDist::point_mass(prob, 1.0 / p.gamma, declared);
    }
  }
  for (std::size_t s : {plus, minus}) {
    for (std::size_t a = 0; a < A; ++a) step[(s * A + a) * S + s] = 1.0;
  }

  std::vector<double> transitions(step);
  transitions.insert(transitions.end(), step.begin(), step.end());
  std::vector<RewardDist> rewards(step_rewards);
  rewards.insert(rewards.end(), step_rewards.begin(), step_rewards.end());

  std::vector<double> initial(S, 0.0);
  for (std::size_t s = 0; s < p.n; ++s) initial[s] = 1.0 / static_cast<double>(p.n);
  return MdpSpec(S, A, H, std::move(transitions), std::move(rewards), std::move(initial));
}

TreeShape ldp_tree_shape(std::size_t max_nodes, std::size_t A) {
  if (A < 2) throw std::invalid_argument("A: the tree needs at least 2 actions");
  if (max_nodes == 0) throw std::invalid_argument("S: leaves no room for the tree root");
  TreeShape shape{1, 1, 1, 0};
  while (true) {
    const std::size_t next_leaves = shape.leaves * A;
    if (shape.nodes + next_leaves > max_nodes) break;
    shape.first_leaf = shape.nodes;
    shape.nodes += next_leaves;
    shape.leaves = next_leaves;
    ++shape.depth;
  }
  return shape;
}

MdpSpec build_ldp_hard(const LdpHardParams& p) {
  check_v(p.v);
  if (p.S < 3) throw std::invalid_argument("S: must be at least 3");
  if (p.A < 2) throw std::invalid_argument("A: must be at least 2");
  const double g = std::pow(p.gamma, 1.0 + p.v);
  if (!(p.gamma > 0.0) || !(g <= 0.75)) {
    throw std::invalid_argument("gamma: gamma^{1+v} must lie in (0, 3/4]");
  }
  const TreeShape tree = ldp_tree_shape(p.S - 2, p.A);
  if (p.optimal && (p.optimal->first >= tree.leaves || p.optimal->second >= p.A)) {
    throw std::invalid_argument("optimal: leaf or action index out of range");
  }

  const std::size_t S = tree.nodes + 2;
  const std::size_t A = p.A;
  const std::size_t H = tree.depth + 1;
  const std::size_t plus = tree.nodes;
  const std::size_t minus = tree.nodes + 1;
  const HeavyTailParams declared = two_point_declared(p.v);

  std::vector<double> step(S * A * S, 0.0);
  std::vector<RewardDist> step_rewards(S * A, RewardDist::constant(0.0, declared));
  for (std::size_t x = 0; x < tree.first_leaf; ++x) {
    for (std::size_t a = 0; a < A; ++a) step[(x * A + a) * S + x * A + a + 1] = 1.0;
  }
  for (std::size_t leaf = 0; leaf < tree.leaves; ++leaf) {
    const std::size_t x = tree.first_leaf + leaf;
    for (std::size_t a = 0; a < A; ++a) {
      const bool best = p.optimal && p.optimal->first == leaf && p.optimal->second == a;
      const double prob = best ? g : g / 2.0;
      step[(x * A + a) * S + plus] = prob;
      step[(x * A + a) * S + minus] = 1.0 - prob;
      step_rewards[x * A + a] = RewardDist::point_mass(prob, 1.0 / p.gamma, declared);
    }
  }
  for (std::size_t s : {plus, minus}) {
    for (std::size_t a = 0; a < A; ++a) step[(s * A + a) * S + s] = 1.0;
  }

  std::vector<double> transitions;
  std::vector<RewardDist> rewards;
  for (std::size_t h = 0; h < H; ++h) {
    transitions.insert(transitions.end(), step.begin(), step.end());
    rewards.insert(rewards.end(), step_rewards.begin(), step_rewards.end());
  }
  std::vector<double> initial(S, 0.0);
  initial[0] = 1.0;
  return MdpSpec(S, A, H, std::move(transitions), std::move(rewards), std::move(initial));
}

double mab_gamma(double v, double gap) { return std::pow(5.0 * gap, 1.0 / v); }

std::vector<RewardDist> build_mab_hard(const MabHardParams& p) {
  check_v(p.v);
  if (p.A < 2) throw std::invalid_argument("A: must be at least 2");
  if (!(p.gap > 0.0 && p.gap < 0.2)) throw std::invalid_argument("gap: must lie in (0, 1/5)");
  if (p.best >= p.A) throw std::invalid_argument("best: arm index out of range");
  if (p.raised && (*p.raised >= p.A || *p.raised == p.best)) {
    throw std::invalid_argument("raised: must be an arm other than the best");
  }
  const double gamma = mab_gamma(p.v, p.gap);
  const double half = std::pow(gamma, 1.0 + p.v) / 2.0;
  const HeavyTailParams declared = two_point_declared(p.v);
  std::vector<RewardDist> arms;
  arms.reserve(p.A);
  for (std::size_t a = 0; a < p.A; ++a) {
    double prob = half - p.gap * gamma;
    if (a == p.best) prob = half;
    if (p.raised && a == *p.raised) prob = half + p.gap * gamma;
    arms.push_back(RewardDist::point_mass(prob, 1.0 / gamma, declared));
  }
  return arms;
}

MdpSpec mab_as_mdp(const std::vector<RewardDist>& arms) {
  if (arms.empty()) throw std::invalid_argument("arms: need at least one");
  const std::size_t A = arms.size();
  return MdpSpec(1, A, 1, std::vector<double>(A, 1.0), arms, {1.0});
}

}  // namespace phrl
