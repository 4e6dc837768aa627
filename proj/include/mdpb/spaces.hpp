#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "mdpb/rng.hpp"

namespace mdpb {

// =====================================================================
// State and action space descriptors
// =====================================================================

struct FiniteSpace {
  std::vector<double> values;  // distinct, ascending
};

struct BoxSpace {
  double lo = 0.0;
  double hi = 1.0;
  int eval_grid = 17;  // size of the finite evaluation grid used for sups
};

class SpaceDesc {
 public:
  static SpaceDesc finite(std::vector<double> values);
  static SpaceDesc box(double lo, double hi, int eval_grid = 17);

  bool is_finite() const { return std::holds_alternative<FiniteSpace>(v_); }
  const std::vector<double>& values() const;  // finite spaces only
  double lo() const;
  double hi() const;

  // Finite spaces: the declared values.  Boxes: uniform grid including
  // both endpoints.
  std::vector<double> eval_points() const;

  bool contains(double x, double tol = 1e-9) const;

  // Index of the nearest declared value within tol, -1 otherwise.
  int index_of(double x, double tol = 1e-9) const;

  std::size_t size() const;  // finite spaces only

 private:
  std::variant<FiniteSpace, BoxSpace> v_;
};

// =====================================================================
// Noise law
// =====================================================================
//
// The driving noise of the random iterative system.  Finite laws expose
// their atoms so conditional expectations can be enumerated exactly;
// the Gaussian law integrates by Gauss-Hermite quadrature.

class NoiseLaw {
 public:
  static NoiseLaw finite(std::vector<double> atoms, std::vector<double> probs);
  static NoiseLaw two_point();                 // {-1,+1} with probability 1/2 each
  static NoiseLaw degenerate(double atom = 0.0);
  static NoiseLaw std_gaussian();

  bool enumerable() const { return !gaussian_; }
  bool gaussian() const { return gaussian_; }
  const std::vector<double>& atoms() const;
  const std::vector<double>& probs() const;

  double sample(Rng& rng) const;

  // E[f(eps)]: exact weighted sum for finite laws, 64-node quadrature for
  // the Gaussian law.
  double expect(const std::function<double(double)>& f) const;

 private:
  bool gaussian_ = false;
  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cum_;
};

}  // namespace mdpb
