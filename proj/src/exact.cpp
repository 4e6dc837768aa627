#include "mdpb/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace mdpb {

namespace {
constexpr double kStateTol = 1e-9;
}

double ExactSolution::value(int h, double x) const {
  if (h < 0 || h >= static_cast<int>(v.size())) {
    throw std::invalid_argument("ExactSolution: stage outside 0..H");
  }
  return v[static_cast<std::size_t>(h)][static_cast<std::size_t>(state_index(x))];
}

double ExactSolution::q_value(int h, double x, double a) const {
  if (h < 0 || h >= static_cast<int>(q.size())) {
    throw std::invalid_argument("ExactSolution: stage outside 0..H-1");
  }
  return q[static_cast<std::size_t>(h)][static_cast<std::size_t>(state_index(x))]
          [static_cast<std::size_t>(action_index(a))];
}

int ExactSolution::state_index(double x) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (std::abs(states[i] - x) <= kStateTol) return static_cast<int>(i);
  }
  throw std::invalid_argument("ExactSolution: state not in table");
}

int ExactSolution::action_index(double a) const {
  for (std::size_t j = 0; j < actions.size(); ++j) {
    if (std::abs(actions[j] - a) <= kStateTol) return static_cast<int>(j);
  }
  throw std::invalid_argument("ExactSolution: action not in table");
}

Policy ExactSolution::policy() const {
  auto table = policy_at;
  auto st = states;
  auto ac = actions;
  Policy pi;
  pi.act = [table, st, ac](int h, double x) {
    if (h < 0 || h >= static_cast<int>(table.size())) {
      throw std::invalid_argument("policy: stage outside 0..H-1");
    }
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (std::abs(st[i] - x) <= kStateTol) {
        return ac[static_cast<std::size_t>(table[static_cast<std::size_t>(h)][i])];
      }
    }
    throw std::invalid_argument("policy: state not in table");
  };
  return pi;
}

ExactSolution solve_exact(const MdpModel& m) {
  if (!m.states.is_finite()) {
    throw std::invalid_argument("solve_exact: state space must be finite");
  }
  if (!m.noise.enumerable()) {
    throw std::invalid_argument("solve_exact: noise must be enumerable");
  }
  const int H = m.horizon;
  ExactSolution sol;
  sol.states = m.states.values();
  sol.actions = m.action_eval();
  const std::size_t ns = sol.states.size();
  const std::size_t na = sol.actions.size();
  const auto& atoms = m.noise.atoms();
  const auto& probs = m.noise.probs();

  // successor index table: succ[t-1][i][j][e]
  std::vector<std::vector<std::vector<std::vector<int>>>> succ(
      static_cast<std::size_t>(H),
      std::vector<std::vector<std::vector<int>>>(
          ns, std::vector<std::vector<int>>(na, std::vector<int>(atoms.size()))));
  for (int t = 1; t <= H; ++t) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t e = 0; e < atoms.size(); ++e) {
          double y = m.kernel(t, sol.states[i], sol.actions[j], atoms[e]);
          int k = m.states.index_of(y, kStateTol);
          if (k < 0) throw std::runtime_error("solve_exact: kernel output not a declared state");
          succ[static_cast<std::size_t>(t - 1)][i][j][e] = k;
        }
      }
    }
  }

  sol.v.assign(static_cast<std::size_t>(H) + 1, std::vector<double>(ns, 0.0));
  sol.q.assign(static_cast<std::size_t>(H),
               std::vector<std::vector<double>>(ns, std::vector<double>(na, 0.0)));
  sol.policy_at.assign(static_cast<std::size_t>(H), std::vector<int>(ns, 0));

  for (std::size_t i = 0; i < ns; ++i) {
    sol.v[static_cast<std::size_t>(H)][i] = m.terminal(sol.states[i]);
  }
  for (int h = H - 1; h >= 0; --h) {
    const auto& vnext = sol.v[static_cast<std::size_t>(h) + 1];
    for (std::size_t i = 0; i < ns; ++i) {
      double best = 0.0;
      int best_j = 0;
      for (std::size_t j = 0; j < na; ++j) {
        double cont = 0.0;
        for (std::size_t e = 0; e < atoms.size(); ++e) {
          cont += probs[e] * vnext[static_cast<std::size_t>(
                                 succ[static_cast<std::size_t>(h)][i][j][e])];
        }
        double val = m.reward(h, sol.states[i], sol.actions[j]) + cont;
        sol.q[static_cast<std::size_t>(h)][i][j] = val;
        if (j == 0 || val > best) {
          best = val;
          best_j = static_cast<int>(j);
        }
      }
      sol.v[static_cast<std::size_t>(h)][i] = best;
      sol.policy_at[static_cast<std::size_t>(h)][i] = best_j;
    }
  }
  return sol;
}

MeanStdErr evaluate_policy_mc(const MdpModel& m, const Policy& pi, double x0,
                              std::int64_t n_paths, std::uint64_t seed,
                              int threads) {
  if (n_paths < 1) throw std::invalid_argument("evaluate_policy_mc: n_paths < 1");
  if (!m.states.contains(x0)) {
    throw std::invalid_argument("evaluate_policy_mc: x0 outside state space");
  }
  std::vector<double> values(static_cast<std::size_t>(n_paths));
  parallel_for(n_paths, threads, [&](std::int64_t p) {
    double x = x0;
    CompensatedSum total;
    for (int h = 0; h < m.horizon; ++h) {
      double a = pi.act(h, x);
      total.add(m.reward(h, x, a));
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(p),
                            static_cast<std::uint64_t>(h));
      double eps = m.noise.sample(rng);
      x = m.kernel(h + 1, x, a, eps);
    }
    total.add(m.terminal(x));
    values[static_cast<std::size_t>(p)] = total.value();
  });
  return mean_and_std_err(values);
}

}  // namespace mdpb
