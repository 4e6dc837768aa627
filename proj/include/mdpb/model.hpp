#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "mdpb/metric.hpp"
#include "mdpb/spaces.hpp"

namespace mdpb {

// =====================================================================
// Finite-horizon controlled random iterative system
// =====================================================================
//
// Dynamics are generated by S_t = K_t(S_{t-1}, a_{t-1}, eps_t) with i.i.d.
// driving noise, stage rewards R_h(x, a) for h = 0..H-1 and a terminal
// reward F(x).  Kernel stages are indexed 1..H: the transition out of
// decision stage t uses kernel stage t+1.

using KernelFn = std::function<double(int t, double x, double a, double eps)>;
using RewardFn = std::function<double(int h, double x, double a)>;
using TerminalFn = std::function<double(double x)>;

struct MdpModel {
  std::string name;
  int horizon = 1;  // H >= 1
  SpaceDesc states = SpaceDesc::box(0.0, 1.0);
  SpaceDesc actions = SpaceDesc::box(0.0, 1.0);
  NoiseLaw noise = NoiseLaw::std_gaussian();
  KernelFn kernel;
  RewardFn reward;
  TerminalFn terminal;
  double r_max = 1.0;       // sup bound on |R_h| and |F|
  double lip_reward = 1.0;  // L_R, in the product metric
  double lip_kernel = 1.0;  // L_K, in the product metric
  ProductMetric metric;
  double x0 = 0.0;  // default start state

  std::vector<double> action_eval() const { return actions.eval_points(); }

  // (H - h + 1) r_max: bound on |V*_h| and the stage-h clipping level.
  double value_bound(int h) const {
    return static_cast<double>(horizon - h + 1) * r_max;
  }
};

// One transition; validates stage range and membership of x and a.
double step(const MdpModel& m, int t, double x, double a, double eps);

struct Policy {
  std::function<double(int h, double x)> act;
};

// Spot-checks the declared contracts on random draws: rewards and terminal
// within r_max, kernel output inside the state space, sampled Lipschitz
// quotients within the declared constants.  Throws on violation.
void validate_model(const MdpModel& m, std::uint64_t seed, int draws = 256);

}  // namespace mdpb
