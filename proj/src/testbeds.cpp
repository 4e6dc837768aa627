#include "mdpb/testbeds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdpb {

MdpModel make_chain3(const Chain3Spec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("chain3: horizon < 1");
  MdpModel m;
  m.name = "chain3";
  m.horizon = spec.horizon;
  m.states = SpaceDesc::finite({0.0, 1.0, 2.0});
  m.actions = SpaceDesc::finite({0.0, 1.0});
  m.noise = NoiseLaw::two_point();
  m.kernel = [](int, double x, double a, double eps) {
    if (a < 0.5) return x;
    return std::clamp(x + eps, 0.0, 2.0);
  };
  double slope = spec.slope;
  double cost = spec.move_cost;
  m.reward = [slope, cost](int, double x, double a) { return slope * (x - 1.0) - cost * a; };
  m.terminal = [](double x) { return 0.5 * (x - 1.0); };
  m.r_max = std::max(slope + cost, 0.5);
  m.lip_reward = std::max(slope, cost);
  m.lip_kernel = 1.0;
  m.x0 = spec.x0;
  return m;
}

MdpModel make_drift1d(const Drift1dSpec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("drift1d: horizon < 1");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("drift1d: sigma must be positive");
  if (!(spec.box > 1.0)) throw std::invalid_argument("drift1d: box must exceed 1");
  MdpModel m;
  m.name = "drift1d";
  m.horizon = spec.horizon;
  m.states = SpaceDesc::box(-spec.box, spec.box);
  m.actions = SpaceDesc::box(-1.0, 1.0, spec.action_grid);
  m.noise = NoiseLaw::std_gaussian();
  double delta = spec.delta;
  double sigma = spec.sigma;
  double box = spec.box;
  m.kernel = [delta, sigma, box](int, double x, double a, double eps) {
    return std::clamp(x + a * delta + sigma * eps, -box, box);
  };
  double fee = spec.action_cost;
  m.reward = [fee](int, double x, double a) { return std::exp(-0.5 * x * x) - fee * a * a; };
  m.terminal = [](double x) { return 0.5 * std::exp(-0.5 * x * x); };
  m.r_max = 1.0;
  // sup |d/dx exp(-x^2/2)| = exp(-1/2); action derivative is 2 fee |a| <= 2 fee.
  m.lip_reward = std::max(std::exp(-0.5), 2.0 * fee);
  m.lip_kernel = std::max(1.0, delta);
  m.x0 = spec.x0;
  return m;
}

ConditionalGaussian drift1d_density(const Drift1dSpec& spec) {
  return ConditionalGaussian{spec.delta, spec.sigma};
}

MdpModel make_det2(const Det2Spec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("det2: horizon < 1");
  MdpModel m;
  m.name = "det2";
  m.horizon = spec.horizon;
  m.states = SpaceDesc::finite({0.0, 1.0});
  m.actions = SpaceDesc::finite({0.0, 1.0});
  m.noise = NoiseLaw::degenerate(0.0);
  m.kernel = [](int, double x, double a, double) {
    if (a < 0.5) return x;
    return 1.0 - x;
  };
  double stay = spec.stay_reward;
  double fee = spec.switch_cost;
  m.reward = [stay, fee](int, double x, double a) { return stay * x - fee * a; };
  m.terminal = [](double x) { return 0.5 * x; };
  m.r_max = 0.5;
  m.lip_reward = std::max(stay, fee);
  m.lip_kernel = 1.0;
  m.x0 = spec.x0;
  return m;
}

}  // namespace mdpb
