#include "mdpb/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mdpb {

double step(const MdpModel& m, int t, double x, double a, double eps) {
  if (t < 1 || t > m.horizon) throw std::invalid_argument("step: stage outside 1..H");
  if (!m.states.contains(x)) throw std::invalid_argument("step: state outside declared space");
  if (!m.actions.contains(a)) throw std::invalid_argument("step: action outside declared space");
  double y = m.kernel(t, x, a, eps);
  if (!m.states.contains(y)) throw std::runtime_error("step: kernel left the state space");
  return y;
}

namespace {

double draw_state(const MdpModel& m, Rng& rng) {
  if (m.states.is_finite()) {
    const auto& v = m.states.values();
    return v[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(v.size())) % v.size()];
  }
  return rng.uniform(m.states.lo(), m.states.hi());
}

double draw_action(const MdpModel& m, Rng& rng) {
  if (m.actions.is_finite()) {
    const auto& v = m.actions.values();
    return v[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(v.size())) % v.size()];
  }
  return rng.uniform(m.actions.lo(), m.actions.hi());
}

}  // namespace

void validate_model(const MdpModel& m, std::uint64_t seed, int draws) {
  if (m.horizon < 1) throw std::invalid_argument("model: horizon < 1");
  if (!(m.r_max > 0.0)) throw std::invalid_argument("model: r_max must be positive");
  if (!m.kernel || !m.reward || !m.terminal) {
    throw std::invalid_argument("model: kernel, reward and terminal must be set");
  }
  if (!m.states.contains(m.x0)) throw std::invalid_argument("model: x0 outside state space");

  Rng rng = Rng::stream(seed, 0x5f0dull);
  const double slack = 1e-9;
  for (int i = 0; i < draws; ++i) {
    double x = draw_state(m, rng);
    double a = draw_action(m, rng);
    double eps = m.noise.sample(rng);
    int t = 1 + static_cast<int>(rng.uniform01() * m.horizon) % m.horizon;

    double y = m.kernel(t, x, a, eps);
    if (!m.states.contains(y)) throw std::runtime_error("model: kernel left the state space");

    double r = m.reward(t - 1, x, a);
    if (std::abs(r) > m.r_max + slack) throw std::runtime_error("model: |R| exceeds r_max");
    double f = m.terminal(x);
    if (std::abs(f) > m.r_max + slack) throw std::runtime_error("model: |F| exceeds r_max");

    // Lipschitz spot check on a second random point with shared noise.
    double x2 = draw_state(m, rng);
    double a2 = draw_action(m, rng);
    double rho = m.metric.joint(x, a, x2, a2);
    if (rho > 0.0) {
      double y2 = m.kernel(t, x2, a2, eps);
      if (std::abs(y - y2) > m.lip_kernel * rho + slack) {
        throw std::runtime_error("model: kernel Lipschitz constant violated");
      }
      double r2 = m.reward(t - 1, x2, a2);
      if (std::abs(r - r2) > m.lip_reward * rho + slack) {
        throw std::runtime_error("model: reward Lipschitz constant violated");
      }
    }
  }
}

}  // namespace mdpb
