#include "phrl/kernels.hpp"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phrl::kernels {

namespace {

// One state's row of the backup. Shared by both paths so the arithmetic (and
// therefore the rounding) is identical.
inline void backup_state(const BackupInput& in, std::size_t s, std::span<double> q_out,
                         std::span<double> v_out, std::span<std::size_t> argmax_out) {
  const std::size_t S = in.S;
  const std::size_t A = in.A;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_a = 0;
  double expected = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    const std::size_t sa = s * A + a;
    const double* row = in.transitions.data() + sa * S;
    double future = 0.0;
    for (std::size_t sn = 0; sn < S; ++sn) future += row[sn] * in.v_next[sn];
    double q = in.reward[sa] + future;
    if (!in.bonus.empty()) q += in.bonus[sa];
    q = std::clamp(q, -in.clip, in.clip);
    q_out[sa] = q;
    if (q > best) {
      best = q;
      best_a = a;
    }
    if (!in.policy.empty()) expected += in.policy[sa] * q;
  }
  v_out[s] = in.policy.empty() ? best : expected;
  if (!argmax_out.empty()) argmax_out[s] = best_a;
}

}  // namespace

void backup_serial(const BackupInput& in, std::span<double> q_out, std::span<double> v_out,
                   std::span<std::size_t> argmax_out) {
  for (std::size_t s = 0; s < in.S; ++s) backup_state(in, s, q_out, v_out, argmax_out);
}

void backup_parallel(const BackupInput& in, std::span<double> q_out, std::span<double> v_out,
                     std::span<std::size_t> argmax_out) {
  const auto n = static_cast<std::int64_t>(in.S);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < n; ++s) {
    backup_state(in, static_cast<std::size_t>(s), q_out, v_out, argmax_out);
  }
}

void backup(Execution exec, const BackupInput& in, std::span<double> q_out,
            std::span<double> v_out, std::span<std::size_t> argmax_out) {
  if (exec == Execution::Auto) {
    // Below a few thousand multiply-adds per step the team start-up dominates.
    exec = (in.S * in.A * in.S >= 1u << 14 && max_threads() > 1) ? Execution::Parallel
                                                                  : Execution::Serial;
  }
  if (exec == Execution::Parallel) {
    backup_parallel(in, q_out, v_out, argmax_out);
  } else {
    backup_serial(in, q_out, v_out, argmax_out);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace phrl::kernels
