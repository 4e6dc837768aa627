#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mdpb/dual.hpp"
#include "mdpb/interpolate.hpp"
#include "mdpb/model.hpp"
#include "mdpb/testbeds.hpp"

namespace mdpb {

// =====================================================================
// Score-weighted martingale functions
// =====================================================================
//
// When the next state has a known conditional density p(y | x, a), every
// test function phi of moderate growth yields a mean-zero member
//
//   m_phi(y) = (d/dy log p(y | x, a)) phi(y) + phi'(y),
//
// because the integral of (p phi)' vanishes.  The shipped family works on
// the location-scale Gaussian p = N(mean(x, a), sigma^2); in standardized
// units z = (y - mean)/sigma the test functions are 1 and
// He_{j-1}(z) exp(-z^2 / 4), giving members
//
//   m_1(z) = -z / sigma
//   m_j(z) = [(j - 2) He_{j-3}(z) - (3z/2) He_{j-2}(z)] exp(-z^2/4) / sigma.
//
// The family is deliberately non-orthonormal, so coefficients come from
// ridge-damped least squares instead of a plain projection.

class ScoreFamily {
 public:
  ScoreFamily(ConditionalGaussian law, int size);

  int size() const { return size_; }
  const ConditionalGaussian& law() const { return law_; }

  // Member values at the standardized displacement z = (y - mean) / sigma.
  void eval(double z, std::span<double> out) const;
  std::vector<double> eval(double z) const;

  // max_j |E_{Z ~ N(0,1)}[m_j(Z)]| by quadrature; analytically zero.
  double max_abs_mean(int quad_nodes = 64) const;

 private:
  ConditionalGaussian law_;
  int size_ = 1;
};

struct ScoreFit {
  std::vector<double> coeff;
  bool degenerate = false;  // pivot collapse; only possible at zero damping
};

// Least-squares fit of v_next composed with the stage-t kernel against the
// family over the given noise block; features are evaluated at z = eps
// (the standardized unclamped displacement), targets at the realized next
// state.  Normal equations get a ridge of damping on the diagonal.
ScoreFit fit_score_coeffs(const MdpModel& m, const ScoreFamily& fam,
                          const std::function<double(double)>& v_next, int t,
                          double x, double a, std::span<const double> noise_block,
                          double damping = 1e-10);

struct ScoreBuildOptions {
  int sample_size = 1024;    // M: draws per stage behind the fit
  int state_points = 17;     // grid resolution over box state spaces
  bool random_grid = false;
  std::uint64_t grid_seed = 0x5EEDu;
  // Damped least-squares coefficients carry no closed-form Lipschitz
  // level, so the grid's own slopes set the default constant; Theory is
  // treated as MaxSlope for this family.
  CoeffLipschitz lipschitz_mode = CoeffLipschitz::MaxSlope;
  double lipschitz_value = 0.0;  // Fixed mode only
  double damping = 1e-10;
  double audit_tol = 1e-8;  // quadrature bound on max_j |E[m_j]|
  int threads = 1;
};

class ScoreMartingale {
 public:
  ScoreMartingale(ScoreFamily family, int horizon,
                  std::vector<std::vector<GridInterpolant>> coeff, int sample_size,
                  double zero_mean_audit, int degenerate_fits);

  // eps is the raw standard-normal draw, which equals the standardized
  // displacement of the unclamped location-scale transition; the zero
  // conditional mean therefore holds exactly even where the kernel clamps.
  double penalty(int t, double x, double a, double eps) const;
  PenaltyFn as_penalty() const;  // shares state, cheap to copy

  int horizon() const { return horizon_; }
  int sample_size() const { return sample_size_; }
  double zero_mean_audit() const { return zero_mean_audit_; }
  int degenerate_fits() const { return degenerate_fits_; }
  const ScoreFamily& family() const { return family_; }
  const std::vector<std::vector<GridInterpolant>>& coefficients() const {
    return coeff_;
  }

 private:
  ScoreFamily family_;
  int horizon_ = 0;
  std::vector<std::vector<GridInterpolant>> coeff_;
  int sample_size_ = 0;
  double zero_mean_audit_ = 0.0;
  int degenerate_fits_ = 0;
};

// Fits coefficient grids for every kernel stage; requires standard
// Gaussian driving noise.  Noise blocks are shared with the dual module's
// addressing, one block per stage.
ScoreMartingale build_score_martingale(const MdpModel& m,
                                       const std::function<double(int, double)>& value,
                                       const ScoreFamily& fam, std::uint64_t seed,
                                       const ScoreBuildOptions& opt = {});

ScoreMartingale build_score_martingale(const MdpModel& m, const PrimalSolution& primal,
                                       const ScoreFamily& fam, std::uint64_t seed,
                                       const ScoreBuildOptions& opt = {});

}  // namespace mdpb
