#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdpb/spaces.hpp"

namespace mdpb {

// =====================================================================
// Reference measures
// =====================================================================
//
// One probability measure per stage with analytically known moments.  The
// regression design is drawn from these, never from the controlled chain,
// so the basis covariance is known in closed form.

class ReferenceMeasure {
 public:
  // mu_h = N(0, (h+1) / (2 alpha)); alpha <= 0 selects alpha = horizon.
  static ReferenceMeasure gaussian_schedule(int horizon, double alpha = 0.0);
  // N(0,1) at every stage.
  static ReferenceMeasure std_gaussian(int horizon);
  // Uniform over an enumerated state set.
  static ReferenceMeasure finite_uniform(std::vector<double> values);

  bool is_finite() const { return finite_; }
  int horizon() const { return horizon_; }
  double mean(int h) const;
  double scale(int h) const;
  const std::vector<double>& atoms() const;
  const std::vector<double>& probs() const;

  double sample(int h, Rng& rng) const;

  // Design block of n draws.  The finite uniform measure fills the block
  // by cycling through its atoms, which gives exact empirical frequencies
  // whenever n is a multiple of the atom count; continuous measures draw
  // i.i.d.
  std::vector<double> sample_block(int h, std::int64_t n, Rng& rng) const;

  // Density against Lebesgue measure, or the probability mass for finite
  // measures (zero off the atoms).
  double density(int h, double x) const;

 private:
  bool finite_ = false;
  int horizon_ = 1;
  std::vector<double> scales_;  // per stage 0..horizon
  std::vector<double> atoms_;
  std::vector<double> probs_;
};

// =====================================================================
// Regression bases
// =====================================================================
//
// Both shipped families are orthonormal under their reference measure, so
// the design covariance is the identity and sigma_inverse_apply is a copy.
// No empirical covariance matrix is ever formed or inverted.

class StateBasis {
 public:
  // Orthonormal probabilists' Hermite functions in the standardized
  // coordinate z = (x - mean_h) / scale_h.  size >= 1; the constant
  // function comes first.  Bounds are certified on |z| <= domain_bound.
  static StateBasis hermite(int size, const ReferenceMeasure& mu,
                            double domain_bound = 6.0);

  // One rescaled indicator per atom of a finite reference measure.
  static StateBasis indicator(const ReferenceMeasure& mu);

  int size() const { return size_; }
  bool is_indicator() const { return indicator_; }
  double domain_bound() const { return domain_bound_; }

  void eval(int h, double x, std::span<double> out) const;
  std::vector<double> eval(int h, double x) const;

  // y = Sigma_{h,K}^{-1} v; identity for the shipped families.
  void sigma_inverse_apply(int h, std::span<const double> in,
                           std::span<double> out) const;

  double lambda_bound() const { return lambda_; }      // sup |Sigma^{-1} gamma|_inf
  double lipschitz() const { return lipschitz_; }      // ||gamma(x)-gamma(y)|| <= L rho
  double second_moment() const { return second_moment_; }  // E ||gamma||^2

 private:
  bool indicator_ = false;
  int size_ = 1;
  double domain_bound_ = 6.0;
  double lambda_ = 1.0;
  double lipschitz_ = 0.0;
  double second_moment_ = 1.0;
  std::vector<double> means_, scales_;  // per stage, hermite only
  std::vector<double> atoms_, probs_;   // indicator only
};

class NoiseBasis {
 public:
  // psi_k = k-th orthonormal probabilists' Hermite function, k = 1..size;
  // the constant is excluded so every member integrates to zero under
  // N(0,1).
  static NoiseBasis hermite(int size, double domain_bound = 8.0);

  // Centered, orthonormalized indicators over the atoms of a finite noise
  // law; spans every zero-mean function on the atoms (size = atoms - 1).
  // A single-atom law admits no nonconstant zero-mean function and is
  // rejected.
  static NoiseBasis indicator(const NoiseLaw& law);

  int size() const { return size_; }
  bool is_indicator() const { return indicator_; }
  double domain_bound() const { return domain_bound_; }

  void eval(double eps, std::span<double> out) const;
  std::vector<double> eval(double eps) const;

  void sigma_inverse_apply(std::span<const double> in, std::span<double> out) const;

  double lambda_bound() const { return lambda_; }
  double second_moment() const { return second_moment_; }

  // max_k |E_law[psi_k]|, by exact sum or quadrature.  The audit every
  // penalty construction must pass.
  double max_abs_mean(const NoiseLaw& law) const;

 private:
  bool indicator_ = false;
  int size_ = 1;
  double domain_bound_ = 8.0;
  double lambda_ = 1.0;
  double second_moment_ = 1.0;
  std::vector<double> atoms_;
  std::vector<std::vector<double>> table_;  // indicator: table_[k][atom]
};

}  // namespace mdpb
