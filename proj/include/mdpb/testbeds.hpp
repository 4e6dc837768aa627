#pragma once

#include "mdpb/model.hpp"

namespace mdpb {

// =====================================================================
// Shipped model instances
// =====================================================================

// Three-state chain, two actions, symmetric two-point noise.  Action 1
// pays a fee and moves the chain by the noise sign; action 0 stays put.
struct Chain3Spec {
  int horizon = 4;  // 3..5 in the shipped experiments
  double move_cost = 0.2;
  double slope = 0.3;
  double x0 = 0.0;
};
MdpModel make_chain3(const Chain3Spec& spec = {});

// One-dimensional controlled drift with Gaussian noise on a clamped box,
// reward peaked at the origin with a quadratic action fee.
struct Drift1dSpec {
  int horizon = 6;
  double delta = 0.25;   // action-to-drift gain
  double sigma = 0.4;    // noise scale
  double box = 6.0;      // state space is [-box, box]
  int action_grid = 17;  // evaluation grid on [-1, 1]
  double action_cost = 0.05;
  double x0 = 1.0;
};
MdpModel make_drift1d(const Drift1dSpec& spec = {});

// Conditional law of the drift1d transition: N(x + a delta, sigma^2).
// Used by the score-function martingale family.
struct ConditionalGaussian {
  double delta = 0.25;
  double sigma = 0.4;
  double mean(double x, double a) const { return x + a * delta; }
  // d/dy log p(y | x, a)
  double score(double y, double x, double a) const {
    return -(y - mean(x, a)) / (sigma * sigma);
  }
};
ConditionalGaussian drift1d_density(const Drift1dSpec& spec = {});

// Two-state deterministic switcher with degenerate noise; every sampled
// quantity has zero variance.
struct Det2Spec {
  int horizon = 3;
  double stay_reward = 0.4;
  double switch_cost = 0.1;
  double x0 = 0.0;
};
MdpModel make_det2(const Det2Spec& spec = {});

}  // namespace mdpb
