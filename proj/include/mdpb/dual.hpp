#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mdpb/basis.hpp"
#include "mdpb/exact.hpp"
#include "mdpb/interpolate.hpp"
#include "mdpb/model.hpp"
#include "mdpb/primal.hpp"

namespace mdpb {

// =====================================================================
// Martingale penalties built by noise regression
// =====================================================================
//
// A penalty family xi_t(x, a, eps) with zero conditional mean in eps turns
// the pathwise maximization of penalized rewards into an upper bound on
// the optimal value, whatever the quality of xi.  This module builds such
// families as
//
//   eta(t, x, a, eps) = sum_k c~_{t,k}(x, a) psi_k(eps)
//
// where every psi_k integrates to zero under the driving noise law and the
// coefficient maps c~ never look at eps; the zero mean is structural, not
// statistical.  Coefficients target the projection of the next-stage value
//
//   c_{t,k}(x, a) = (1/M) sum_m v_t(K_t(x, a, eps_m)) [Sigma_E^{-1} psi(eps_m)]_k
//
// over a noise block shared by every (x, a), are fitted on a state/action
// grid and extended between grid points by central Lipschitz
// interpolation.

// Penalty increment keyed like the kernel: stage t in 1..H, x and a the
// pre-transition state and action, eps the stage-t noise draw.
using PenaltyFn = std::function<double(int t, double x, double a, double eps)>;

// Noise block for kernel stage t.  Draw m comes from the stream
// (seed, tag, t, m), so the block depends on (seed, t) only and is reused
// across the whole stage-t grid.
std::vector<double> dual_noise_block(const NoiseLaw& law, int t, int sample_size,
                                     std::uint64_t seed);

// Empirical projection coefficients of v_next composed with the stage-t
// kernel at (x, a), over the given draws.
std::vector<double> estimate_dual_coeffs(const MdpModel& m,
                                         const std::function<double(double)>& v_next,
                                         const NoiseBasis& psi, int t, double x,
                                         double a, std::span<const double> noise_block);

// Same coefficients with the empirical average replaced by the exact
// expectation over the atoms of an enumerable law.
std::vector<double> exact_dual_coeffs(const MdpModel& m,
                                      const std::function<double(double)>& v_next,
                                      const NoiseBasis& psi, int t, double x,
                                      double a);

// How the interpolants' Lipschitz constant is chosen.
enum class CoeffLipschitz {
  Theory,    // L_v L_K Lambda_E from the declared model and basis constants
  Fixed,     // user-supplied value
  MaxSlope,  // largest difference quotient observed on the fitted grid
};

struct DualBuildOptions {
  int sample_size = 1024;    // M: draws per stage behind the coefficient fit
  bool exact_noise = false;  // enumerable laws: integrate instead of sampling
  int state_points = 17;     // grid resolution over box state spaces
  bool random_grid = false;  // scatter the box states instead of a lattice
  std::uint64_t grid_seed = 0x5EEDu;
  CoeffLipschitz lipschitz_mode = CoeffLipschitz::Theory;
  double lipschitz_value = 0.0;  // Fixed mode only
  double audit_tol = 1e-12;      // bound on max_k |E[psi_k]| under the model law
  int threads = 1;
};

class DualMartingale {
 public:
  DualMartingale(NoiseBasis psi, int horizon,
                 std::vector<std::vector<GridInterpolant>> coeff, int sample_size,
                 double zero_mean_audit);

  double penalty(int t, double x, double a, double eps) const;
  PenaltyFn as_penalty() const;  // shares state, cheap to copy

  int horizon() const { return horizon_; }
  int sample_size() const { return sample_size_; }  // 0 under exact integration
  double zero_mean_audit() const { return zero_mean_audit_; }
  const NoiseBasis& noise_basis() const { return psi_; }
  // coefficients()[t-1][k] interpolates c_{t,k}
  const std::vector<std::vector<GridInterpolant>>& coefficients() const {
    return coeff_;
  }

 private:
  NoiseBasis psi_;
  int horizon_ = 0;
  std::vector<std::vector<GridInterpolant>> coeff_;
  int sample_size_ = 0;
  double zero_mean_audit_ = 0.0;
};

// Fits coefficient grids for every kernel stage against the given stage
// values (value(t, y) for t = 1..H, terminal included at t = H).  Finite
// state spaces get a full state x evaluation-action grid in exact-lookup
// mode; boxes get a lattice or scatter with central interpolation.
// Throws if the noise basis fails the zero-mean audit under the model's
// law.
DualMartingale build_dual_martingale(const MdpModel& m,
                                     const std::function<double(int, double)>& value,
                                     double value_lipschitz, const NoiseBasis& psi,
                                     std::uint64_t seed,
                                     const DualBuildOptions& opt = {});

// Convenience overload wiring in the primal estimate and its certified
// Lipschitz level.
DualMartingale build_dual_martingale(const MdpModel& m, const PrimalSolution& primal,
                                     const NoiseBasis& psi, std::uint64_t seed,
                                     const DualBuildOptions& opt = {});

// Ideal penalty from a stage-value family: realized next-stage value minus
// its conditional mean, the expectation taken exactly (atom sum) or by
// quadrature.  No regression, no grid.
PenaltyFn centered_value_penalty(const MdpModel& m,
                                 const std::function<double(int, double)>& value);

// Ideal penalty from the exact solution.  With it the penalized pathwise
// maximum equals the optimal value on every single path.
PenaltyFn exact_dual_penalty(const MdpModel& m, const ExactSolution& exact);

}  // namespace mdpb
