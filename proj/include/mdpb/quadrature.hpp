#pragma once

#include <vector>

namespace mdpb {

// Gauss-Hermite rule for the standard normal weight: E[f(Z)] ~ sum w_i f(z_i).
// Exact for polynomials of degree <= 2n-1.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// Cached rules; n in [1, 256].
const GaussHermite& gauss_hermite(int n);

}  // namespace mdpb
