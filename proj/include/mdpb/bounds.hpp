#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mdpb/detsum.hpp"
#include "mdpb/dual.hpp"
#include "mdpb/model.hpp"
#include "mdpb/primal.hpp"

namespace mdpb {

// =====================================================================
// Pathwise upper bounds and the duality gap
// =====================================================================
//
// For a frozen noise path eps_1..eps_H the penalized pathwise problem
//
//   sup over action sequences of
//     sum_h [ R_h(x_h, a_h) - xi_{h+1}(x_h, a_h, eps_{h+1}) ] + F(x_H)
//
// is solved exactly over the evaluation actions.  Whenever every xi has
// zero conditional mean in its noise argument the expectation of this
// supremum dominates the optimal value, so averaging over fresh paths
// yields an upper confidence bound; rolling out a feasible policy yields
// the matching lower bound, and the difference is a computable optimality
// certificate.

struct NodeCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathwiseProblem {
  const MdpModel* model = nullptr;
  PenaltyFn penalty;          // empty: nothing subtracted
  std::vector<double> noise;  // eps_t for kernel stages 1..H
  double x0 = 0.0;
  std::int64_t node_cap = 1'000'000;
};

struct PathwiseResult {
  double value = 0.0;
  std::vector<double> actions;  // lexicographically smallest optimizer
  std::int64_t nodes = 0;       // (stage, state) evaluations
};

// Exact maximization over the action prefix tree of one frozen path by
// exhaustive descent; states depend on the whole action prefix, so no
// merging is attempted and searches abort past node_cap.
PathwiseResult pathwise_sup(const PathwiseProblem& p);

struct BoundOptions {
  std::int64_t n_paths = 1024;
  std::uint64_t seed = 1;
  std::int64_t node_cap = 1'000'000;
  int threads = 1;
};

struct UpperBoundResult {
  MeanStdErr estimate;
  double path_min = 0.0;  // extremes across paths; zero spread under the
  double path_max = 0.0;  // ideal penalty certifies strong duality
  std::int64_t max_nodes = 0;
};

// Mean penalized pathwise supremum over n_paths fresh noise paths.  Path
// noise is addressed (seed, path, stage) exactly like the policy
// rollouts, so upper and lower bounds run at one seed share their paths.
UpperBoundResult upper_bound(const MdpModel& m, const PenaltyFn& penalty, double x0,
                             const BoundOptions& opt);

// Mean greedy-policy rollout value: the feasible lower half of the
// sandwich, on the same (seed, path, stage) noise addressing as above.
MeanStdErr lower_bound(const MdpModel& m, const PrimalSolution& primal, double x0,
                       std::int64_t n_paths, std::uint64_t seed, int threads = 1);

struct GapResult {
  double lower = 0.0;
  double lower_se = 0.0;
  double upper = 0.0;
  double upper_se = 0.0;
  double gap = 0.0;  // upper - lower
  double path_min = 0.0;
  double path_max = 0.0;
  std::int64_t max_nodes = 0;
};

// Sandwich around the optimal value at x0: greedy rollouts of the primal
// estimate below, the penalized pathwise bound above, both over the same
// test paths.
GapResult duality_gap(const MdpModel& m, const PrimalSolution& primal,
                      const PenaltyFn& penalty, double x0, std::int64_t n_test,
                      std::uint64_t seed_test, std::int64_t node_cap = 1'000'000,
                      int threads = 1);

}  // namespace mdpb
