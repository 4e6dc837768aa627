#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mdpb/basis.hpp"
#include "mdpb/exact.hpp"
#include "mdpb/model.hpp"

namespace mdpb {

// =====================================================================
// Lower-biased value estimation by clipped pseudo-regression
// =====================================================================
//
// One backward sweep.  At stage h a fresh design block (X_i, eps_i) is
// drawn with X_i from the stage-h reference measure; the same block is
// reused for every action.  Coefficients are
//
//   beta_{N,a} = (1/N) sum_i V_{h+1,N}(K_{h+1}(X_i, a, eps_i))
//                         Sigma_h^{-1} gamma(X_i),
//
// a plain average thanks to the analytically known design covariance; no
// empirical covariance is inverted.  Stage values are
//
//   V_{h,N}(x) = max_a [ R_h(x, a) + clip(beta_{N,a} . gamma(x), level_h) ]
//
// with level_h = (H - h) r_max, so estimates can never leave the feasible
// value range no matter how poor the regression is.

// Truncation at +-level; level must be nonnegative.
double clip(double v, double level);

struct StageEstimate {
  int stage = 0;
  double clip_level = 0.0;                 // applies to the continuation term
  std::vector<std::vector<double>> beta;   // [action][coefficient]
  std::vector<double> beta_norm;           // diagnostics, per action
  double clip_rate = 0.0;                  // active-truncation share on the design
};

struct PrimalOptions {
  // Replace the stage-0 regression by a direct Monte Carlo average at x0.
  // The resulting stage-0 estimate is only evaluable at x0.
  bool final_stage_mc = false;
  int threads = 1;
};

class PrimalSolution {
 public:
  PrimalSolution(MdpModel model, ReferenceMeasure mu, StateBasis basis,
                 std::vector<StageEstimate> stages, std::int64_t n,
                 std::uint64_t seed, bool stage0_mc, double x0);

  // V_{h,N}(x) for h = 0..H; stage H is the terminal reward itself.
  double value(int h, double x) const;

  // clip(beta_a . gamma(x)) at stage h.
  double continuation(int h, double x, std::size_t action_index) const;

  // Greedy one-step lookahead policy; ties resolve to the lowest action
  // index.
  Policy greedy_policy() const;

  const MdpModel& model() const { return model_; }
  const StateBasis& basis() const { return basis_; }
  const ReferenceMeasure& measure() const { return mu_; }
  const std::vector<StageEstimate>& stages() const { return stages_; }
  const std::vector<double>& actions() const { return actions_; }
  std::int64_t sample_size() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  bool stage0_mc() const { return stage0_mc_; }

  // L_R + V*_max Lambda_K sqrt(K) L_{gamma,K}: certified Lipschitz level
  // of every stage value on the basis domain.
  double value_lipschitz() const;

 private:
  MdpModel model_;
  ReferenceMeasure mu_;
  StateBasis basis_;
  std::vector<double> actions_;
  std::vector<StageEstimate> stages_;
  std::int64_t n_ = 0;
  std::uint64_t seed_ = 0;
  bool stage0_mc_ = false;
  double x0_ = 0.0;
};

// Coefficients for one action at stage h against a fixed next-stage value
// function.  The design block depends on (seed, h) only, so calls for
// different actions at equal (seed, h) see identical draws.
std::vector<double> estimate_beta(const MdpModel& m, const ReferenceMeasure& mu,
                                  const StateBasis& basis, int h,
                                  const std::function<double(double)>& v_next,
                                  double action, std::int64_t n,
                                  std::uint64_t seed, int threads = 1);

// Full backward sweep, one fresh block per stage.
PrimalSolution backward_pass(const MdpModel& m, const ReferenceMeasure& mu,
                             const StateBasis& basis, std::int64_t n,
                             std::uint64_t seed,
                             const PrimalOptions& opt = {});

}  // namespace mdpb
