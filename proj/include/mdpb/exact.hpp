#pragma once

#include <cstdint>
#include <vector>

#include "mdpb/detsum.hpp"
#include "mdpb/model.hpp"

namespace mdpb {

// =====================================================================
// Exact backward recursion on enumerable instances
// =====================================================================

struct ExactSolution {
  std::vector<double> states;   // enumerated state values
  std::vector<double> actions;  // evaluation actions
  // v[h][i] for h = 0..H, q[h][i][j] and policy_at[h][i] for h = 0..H-1
  std::vector<std::vector<double>> v;
  std::vector<std::vector<std::vector<double>>> q;
  std::vector<std::vector<int>> policy_at;

  double value(int h, double x) const;
  double q_value(int h, double x, double a) const;
  Policy policy() const;

  int state_index(double x) const;
  int action_index(double a) const;
};

// Requires a finite state space, enumerable noise and a finite action
// evaluation set.  Sups are over the evaluation actions; ties resolve to
// the lowest action index.
ExactSolution solve_exact(const MdpModel& m);

// Unbiased estimate of the policy value at x0 from n_paths rollouts.
// Per-path noise streams are addressed by (seed, path, stage), so the
// result is reproducible and independent of thread count.
MeanStdErr evaluate_policy_mc(const MdpModel& m, const Policy& pi, double x0,
                              std::int64_t n_paths, std::uint64_t seed,
                              int threads = 1);

}  // namespace mdpb
