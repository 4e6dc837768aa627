#pragma once

// Independent reference for small enumerable instances: score every
// deterministic Markov policy by exact distribution propagation and take
// the best.  Cost is |A|^(|S| H) policy evaluations, so keep instances tiny.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mdpb/model.hpp"

namespace mdpb::testsupport {

struct EnumeratedDynamics {
  std::vector<double> states;
  std::vector<double> actions;
  // trans[h][i][j][k] = P(next = k | stage h, state i, action j)
  std::vector<std::vector<std::vector<std::vector<double>>>> trans;
};

inline EnumeratedDynamics enumerate_dynamics(const MdpModel& m) {
  EnumeratedDynamics d;
  d.states = m.states.values();
  d.actions = m.action_eval();
  std::size_t ns = d.states.size(), na = d.actions.size();
  const auto& atoms = m.noise.atoms();
  const auto& probs = m.noise.probs();
  d.trans.assign(static_cast<std::size_t>(m.horizon),
                 std::vector<std::vector<std::vector<double>>>(
                     ns, std::vector<std::vector<double>>(na, std::vector<double>(ns, 0.0))));
  for (int h = 0; h < m.horizon; ++h) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t e = 0; e < atoms.size(); ++e) {
          double y = m.kernel(h + 1, d.states[i], d.actions[j], atoms[e]);
          int k = m.states.index_of(y, 1e-9);
          if (k < 0) throw std::runtime_error("enumerate_dynamics: stray kernel output");
          d.trans[static_cast<std::size_t>(h)][i][j][static_cast<std::size_t>(k)] += probs[e];
        }
      }
    }
  }
  return d;
}

// Exact value of one deterministic Markov policy pi[h][i] at x0.
inline double policy_value_exact(const MdpModel& m, const EnumeratedDynamics& d,
                                 const std::vector<std::vector<int>>& pi, double x0) {
  std::size_t ns = d.states.size();
  std::vector<double> dist(ns, 0.0);
  int i0 = m.states.index_of(x0, 1e-9);
  if (i0 < 0) throw std::runtime_error("policy_value_exact: x0 not a state");
  dist[static_cast<std::size_t>(i0)] = 1.0;
  double total = 0.0;
  for (int h = 0; h < m.horizon; ++h) {
    std::vector<double> next(ns, 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
      if (dist[i] == 0.0) continue;
      int j = pi[static_cast<std::size_t>(h)][i];
      total += dist[i] * m.reward(h, d.states[i], d.actions[static_cast<std::size_t>(j)]);
      const auto& row = d.trans[static_cast<std::size_t>(h)][i][static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < ns; ++k) next[k] += dist[i] * row[k];
    }
    dist.swap(next);
  }
  for (std::size_t i = 0; i < ns; ++i) total += dist[i] * m.terminal(d.states[i]);
  return total;
}

// Max over all deterministic Markov policies.  Throws if the enumeration
// would exceed max_policies.
inline double brute_force_value(const MdpModel& m, double x0,
                                long long max_policies = 1 << 22) {
  EnumeratedDynamics d = enumerate_dynamics(m);
  std::size_t ns = d.states.size(), na = d.actions.size();
  long long cells = static_cast<long long>(m.horizon) * static_cast<long long>(ns);
  long long count = 1;
  for (long long c = 0; c < cells; ++c) {
    count *= static_cast<long long>(na);
    if (count > max_policies) throw std::runtime_error("brute_force_value: too many policies");
  }
  std::vector<std::vector<int>> pi(static_cast<std::size_t>(m.horizon),
                                   std::vector<int>(ns, 0));
  double best = -std::numeric_limits<double>::infinity();
  for (long long code = 0; code < count; ++code) {
    long long c = code;
    for (int h = 0; h < m.horizon; ++h) {
      for (std::size_t i = 0; i < ns; ++i) {
        pi[static_cast<std::size_t>(h)][i] = static_cast<int>(c % static_cast<long long>(na));
        c /= static_cast<long long>(na);
      }
    }
    best = std::max(best, policy_value_exact(m, d, pi, x0));
  }
  return best;
}

}  // namespace mdpb::testsupport
