#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "phrl/heavy.hpp"
#include "phrl/mdp.hpp"

namespace phrl {

/// Six-state chain. Action 0 (left) moves one state left deterministically;
/// action 1 (right) moves right with the probabilities below. Rewards are
/// symmetric stable laws with mean 0.005 at (leftmost, left), 1 at
/// (rightmost, right) and 0 elsewhere. Episodes start at the leftmost state.
struct RiverSwimParams {
  /// Declared moment bounds. For alpha = 2, sigma = 1 every cell is
  /// N(mu, 2) with mu in [0, 1], so E|X|^2 <= 3.
  HeavyTailParams heavy{1.0, 3.0, 1.0};
  double alpha = 2.0;
  double sigma = 1.0;
  std::size_t horizon = 20;

  double start_advance = 0.3;
  double start_stay = 0.7;
  double mid_advance = 0.3;
  double mid_stay = 0.6;
  double mid_retreat = 0.1;
  double end_stay = 0.6;
  double end_retreat = 0.4;
};

inline constexpr std::size_t kRiverSwimStates = 6;
inline constexpr std::size_t kRiverSwimLeft = 0;
inline constexpr std::size_t kRiverSwimRight = 1;

MdpSpec build_riverswim(const RiverSwimParams& params = {});

/// Two-step instance: initial states 0..n-1 (uniform), then an absorbing
/// "+" state (index n) or "-" state (index n+1). From initial state s the
/// probability of "+" is 5/10 g for action 0, 3/10 g for the others, and
/// 7/10 g for action optimal[s] when that is not 0, with g = gamma^{1+v}.
/// The induced reward (1/gamma on "+", 0 on "-") is attached to the (s, a)
/// cell as a two-point law.
struct JdpHardParams {
  std::size_t n = 4;
  std::size_t m = 4;
  double v = 1.0;
  double gamma = 0.5;
  /// Optimal action per initial state; empty means action 0 everywhere.
  std::vector<std::size_t> optimal;
};

MdpSpec build_jdp_hard(const JdpHardParams& params);

/// Perfect A-ary tree of depth d in heap order (child of x under a is
/// x*A + a + 1) with as many levels as fit in S - 2 nodes, followed by the
/// absorbing "+" and "-" states. Every leaf-action pair reaches "+" with
/// probability g/2, except the optimal pair with probability g, where
/// g = gamma^{1+v}. H = d + 1. The resulting MDP has (tree nodes + 2) states,
/// which is S when S - 2 is a full tree size.
struct LdpHardParams {
  std::size_t S = 15;
  std::size_t A = 3;
  double v = 1.0;
  double gamma = 0.5;
  /// (leaf number in 0..L-1, action); empty gives the symmetric instance.
  std::optional<std::pair<std::size_t, std::size_t>> optimal;
};

struct TreeShape {
  std::size_t depth = 0;   // levels, root included
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t first_leaf = 0;
};

/// Largest perfect A-ary tree with at most max_nodes nodes.
TreeShape ldp_tree_shape(std::size_t max_nodes, std::size_t A);

MdpSpec build_ldp_hard(const LdpHardParams& params);

/// Two-point arms: the best arm has P(1/gamma) = gamma^{1+v}/2, the others
/// gamma^{1+v}/2 - gap*gamma, and the optional raised arm
/// gamma^{1+v}/2 + gap*gamma, with gamma = (5 gap)^{1/v}.
struct MabHardParams {
  std::size_t A = 2;
  double v = 1.0;
  double gap = 0.1;
  std::size_t best = 0;
  std::optional<std::size_t> raised;
};

double mab_gamma(double v, double gap);

std::vector<RewardDist> build_mab_hard(const MabHardParams& params);

/// Single-state, single-step MDP whose actions are the given arms.
MdpSpec mab_as_mdp(const std::vector<RewardDist>& arms);

}  // namespace phrl
