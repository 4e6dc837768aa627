#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpb/quadrature.hpp"

using namespace mdpb;

// Gaussian moments: E[Z^{2m}] = (2m-1)!!, odd moments vanish.
TEST_CASE("rule reproduces Gaussian moments exactly") {
  for (int n : {8, 32, 64}) {
    const auto& gh = gauss_hermite(n);
    double w = 0.0;
    for (double wi : gh.weights) w += wi;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));

    double dfact = 1.0;
    for (int m = 1; 2 * m <= 2 * n - 2 && m <= 12; ++m) {
      dfact *= 2.0 * m - 1.0;
      double even = gh.integrate([m](double z) { return std::pow(z, 2 * m); });
      double odd = gh.integrate([m](double z) { return std::pow(z, 2 * m - 1); });
      CHECK(even == doctest::Approx(dfact).epsilon(1e-12));
      CHECK(std::abs(odd) <= 1e-12 * dfact);
    }
  }
}

TEST_CASE("64-node rule integrates smooth non-polynomials") {
  const auto& gh = gauss_hermite(64);
  // E[exp(tZ)] = exp(t^2/2)
  for (double t : {0.3, 1.0, 2.0}) {
    double got = gh.integrate([t](double z) { return std::exp(t * z); });
    CHECK(got == doctest::Approx(std::exp(0.5 * t * t)).epsilon(1e-12));
  }
  // E[cos(Z)] = exp(-1/2)
  double c = gh.integrate([](double z) { return std::cos(z); });
  CHECK(c == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("nodes are symmetric and ascending") {
  const auto& gh = gauss_hermite(64);
  for (std::size_t i = 0; i + 1 < gh.nodes.size(); ++i) {
    CHECK(gh.nodes[i] < gh.nodes[i + 1]);
  }
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    CHECK(gh.nodes[i] == -gh.nodes[gh.nodes.size() - 1 - i]);
    CHECK(gh.weights[i] == gh.weights[gh.nodes.size() - 1 - i]);
  }
}
