#include "mdpb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "mdpb/exact.hpp"

namespace mdpb {

namespace {

void bump_nodes(std::int64_t& nodes, std::int64_t cap) {
  if (++nodes > cap) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "pathwise_sup: node cap %lld exceeded",
                  static_cast<long long>(cap));
    throw NodeCapExceeded(buf);
  }
}

// Exhaustive descent over the action prefix tree.  States downstream
// depend on the whole action prefix, so no merging is attempted; the node
// cap guards blowup.  Returns the subtree value and leaves the optimal
// action suffix in suffix; ties keep the first action, so the
// reconstructed path is lexicographically smallest.
double tree_descend(const MdpModel& m, const PathwiseProblem& p,
                    const std::vector<double>& actions, int h, double x,
                    std::int64_t& nodes, std::vector<double>& suffix) {
  bump_nodes(nodes, p.node_cap);
  if (h == m.horizon) {
    suffix.clear();
    return m.terminal(x);
  }
  double eps = p.noise[static_cast<std::size_t>(h)];
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_suffix, child;
  double best_a = actions.front();
  for (double a : actions) {
    double pen = p.penalty ? p.penalty(h + 1, x, a, eps) : 0.0;
    double next = m.kernel(h + 1, x, a, eps);
    double val =
        m.reward(h, x, a) - pen + tree_descend(m, p, actions, h + 1, next, nodes, child);
    if (val > best) {
      best = val;
      best_a = a;
      best_suffix = std::move(child);
      child.clear();
    }
  }
  suffix = std::move(best_suffix);
  suffix.insert(suffix.begin(), best_a);
  return best;
}

std::vector<double> test_noise_path(const MdpModel& m, std::uint64_t seed,
                                    std::int64_t path) {
  std::vector<double> eps(static_cast<std::size_t>(m.horizon));
  for (int h = 0; h < m.horizon; ++h) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(path),
                          static_cast<std::uint64_t>(h));
    eps[static_cast<std::size_t>(h)] = m.noise.sample(rng);
  }
  return eps;
}

}  // namespace

PathwiseResult pathwise_sup(const PathwiseProblem& p) {
  if (p.model == nullptr) throw std::invalid_argument("pathwise_sup: no model");
  const MdpModel& m = *p.model;
  if (static_cast<int>(p.noise.size()) != m.horizon) {
    throw std::invalid_argument("pathwise_sup: need one noise draw per stage");
  }
  if (p.node_cap < 1) throw std::invalid_argument("pathwise_sup: node_cap < 1");
  std::vector<double> actions = m.action_eval();
  if (actions.empty()) throw std::invalid_argument("pathwise_sup: no actions");

  PathwiseResult out;
  out.value = tree_descend(m, p, actions, 0, p.x0, out.nodes, out.actions);
  return out;
}

UpperBoundResult upper_bound(const MdpModel& m, const PenaltyFn& penalty, double x0,
                             const BoundOptions& opt) {
  if (opt.n_paths < 1) throw std::invalid_argument("upper_bound: n_paths < 1");
  if (!m.states.contains(x0)) {
    throw std::invalid_argument("upper_bound: x0 outside state space");
  }
  std::size_t n = static_cast<std::size_t>(opt.n_paths);
  std::vector<double> values(n);
  std::vector<std::int64_t> nodes(n, 0);
  // worker threads cannot throw across the join; failures are stashed per
  // path and the first one is rethrown afterwards
  std::vector<std::string> errors(n);
  std::vector<char> capped(n, 0);
  parallel_for(opt.n_paths, opt.threads, [&](std::int64_t path) {
    std::size_t s = static_cast<std::size_t>(path);
    try {
      PathwiseProblem prob;
      prob.model = &m;
      prob.penalty = penalty;
      prob.noise = test_noise_path(m, opt.seed, path);
      prob.x0 = x0;
      prob.node_cap = opt.node_cap;
      PathwiseResult r = pathwise_sup(prob);
      values[s] = r.value;
      nodes[s] = r.nodes;
    } catch (const NodeCapExceeded& e) {
      errors[s] = e.what();
      capped[s] = 1;
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  });
  for (std::size_t s = 0; s < n; ++s) {
    if (!errors[s].empty()) {
      std::string msg = "upper_bound: path " + std::to_string(s) + ": " + errors[s];
      if (capped[s]) throw NodeCapExceeded(msg);
      throw std::runtime_error(msg);
    }
  }

  UpperBoundResult out;
  out.estimate = mean_and_std_err(values);
  out.path_min = *std::min_element(values.begin(), values.end());
  out.path_max = *std::max_element(values.begin(), values.end());
  out.max_nodes = *std::max_element(nodes.begin(), nodes.end());
  return out;
}

MeanStdErr lower_bound(const MdpModel& m, const PrimalSolution& primal, double x0,
                       std::int64_t n_paths, std::uint64_t seed, int threads) {
  return evaluate_policy_mc(m, primal.greedy_policy(), x0, n_paths, seed, threads);
}

GapResult duality_gap(const MdpModel& m, const PrimalSolution& primal,
                      const PenaltyFn& penalty, double x0, std::int64_t n_test,
                      std::uint64_t seed_test, std::int64_t node_cap, int threads) {
  BoundOptions opt;
  opt.n_paths = n_test;
  opt.seed = seed_test;
  opt.node_cap = node_cap;
  opt.threads = threads;
  UpperBoundResult up = upper_bound(m, penalty, x0, opt);
  MeanStdErr low = lower_bound(m, primal, x0, n_test, seed_test, threads);
  GapResult out;
  out.lower = low.mean;
  out.lower_se = low.std_err;
  out.upper = up.estimate.mean;
  out.upper_se = up.estimate.std_err;
  out.gap = out.upper - out.lower;
  out.path_min = up.path_min;
  out.path_max = up.path_max;
  out.max_nodes = up.max_nodes;
  return out;
}

}  // namespace mdpb
