#pragma once

#include <cstddef>
#include <limits>
#include <span>

namespace phrl {

/// Which implementation of a data-parallel kernel to run. `Serial` is the
/// reference; `Parallel` uses OpenMP and must agree with it bit for bit;
/// `Auto` picks `Parallel` only when the loop is large enough to pay for the
/// thread team.
enum class Execution { Serial, Parallel, Auto };

namespace kernels {

/// Inputs of one backward-induction step at a fixed h. Arrays are flat:
/// `reward` and `bonus` are indexed [s*A + a], `transitions` [(s*A + a)*S + s'],
/// `policy` [s*A + a]. An empty `bonus` means zero bonus; an empty `policy`
/// means V(s) = max_a Q(s,a) with the lowest index winning ties.
struct BackupInput {
  std::size_t S = 0;
  std::size_t A = 0;
  std::span<const double> reward;
  std::span<const double> transitions;
  std::span<const double> bonus;
  std::span<const double> v_next;
  std::span<const double> policy;
  /// Q is clipped to [-clip, clip].
  double clip = std::numeric_limits<double>::infinity();
};

/// Q(s,a) = clip(reward + sum_s' P(s'|s,a) v_next(s') + bonus) and
/// V(s) = max_a Q or sum_a pi(a|s) Q. Writes S*A entries of `q_out` and S of
/// `v_out`; `argmax_out`, when non-empty, receives the maximising action.
void backup_serial(const BackupInput& in, std::span<double> q_out, std::span<double> v_out,
                   std::span<std::size_t> argmax_out = {});

void backup_parallel(const BackupInput& in, std::span<double> q_out, std::span<double> v_out,
                     std::span<std::size_t> argmax_out = {});

void backup(Execution exec, const BackupInput& in, std::span<double> q_out,
            std::span<double> v_out, std::span<std::size_t> argmax_out = {});

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace phrl
