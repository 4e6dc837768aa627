#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace mdpb {

// Metric on the product of state and action space.  Component metrics are
// combined by a norm on the pair (rho_S, rho_A); the combiner must be
// monotone so the product stays a metric.
struct ProductMetric {
  enum class Combine { Sum, Max, Euclid };

  std::function<double(double, double)> rho_s =
      [](double x, double y) { return std::abs(x - y); };
  std::function<double(double, double)> rho_a =
      [](double a, double b) { return std::abs(a - b); };
  Combine combine = Combine::Sum;

  double state(double x, double y) const { return rho_s(x, y); }
  double action(double a, double b) const { return rho_a(a, b); }

  double joint(double x, double a, double y, double b) const {
    double ds = rho_s(x, y);
    double da = rho_a(a, b);
    switch (combine) {
      case Combine::Sum: return ds + da;
      case Combine::Max: return std::max(ds, da);
      case Combine::Euclid: return std::sqrt(ds * ds + da * da);
    }
    throw std::logic_error("ProductMetric: bad combiner");
  }
};

}  // namespace mdpb
