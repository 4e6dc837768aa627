#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpb/basis.hpp"
#include "mdpb/detsum.hpp"
#include "mdpb/quadrature.hpp"
#include "mdpb/rng.hpp"

using namespace mdpb;

TEST_CASE("hermite state basis starts with 1, z, (z^2-1)/sqrt(2)") {
  auto mu = ReferenceMeasure::std_gaussian(3);
  StateBasis b2 = StateBasis::hermite(2, mu);
  for (double x : {-1.7, 0.0, 0.4, 2.2}) {
    auto v = b2.eval(0, x);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == x);
  }
  StateBasis b3 = StateBasis::hermite(3, mu);
  for (double x : {-0.9, 1.3}) {
    auto v = b3.eval(1, x);
    CHECK(v[2] == doctest::Approx((x * x - 1.0) / std::sqrt(2.0)).epsilon(1e-15));
  }
}

TEST_CASE("standardization follows the stage scale") {
  auto mu = ReferenceMeasure::gaussian_schedule(4);  // alpha = 4
  StateBasis b = StateBasis::hermite(2, mu);
  for (int h = 0; h <= 4; ++h) {
    double s = std::sqrt((h + 1) / 8.0);
    CHECK(mu.scale(h) == doctest::Approx(s).epsilon(1e-15));
    auto v = b.eval(h, 0.7);
    CHECK(v[1] == doctest::Approx(0.7 / s).epsilon(1e-14));
  }
}

TEST_CASE("declared covariance is the identity under quadrature") {
  auto mu = ReferenceMeasure::gaussian_schedule(5);
  const auto& gh = gauss_hermite(64);
  for (int K : {1, 3, 8}) {
    StateBasis b = StateBasis::hermite(K, mu);
    for (int h = 0; h < 5; ++h) {
      double s = mu.scale(h);
      for (int j = 0; j < K; ++j) {
        for (int k = 0; k < K; ++k) {
          double cov = gh.integrate([&](double z) {
            auto v = b.eval(h, s * z);  // z is standard normal, x = s z ~ mu_h
            return v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
          });
          CHECK(std::abs(cov - (j == k ? 1.0 : 0.0)) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("empirical covariance converges to the identity") {
  auto mu = ReferenceMeasure::std_gaussian(1);
  const int K = 3;
  StateBasis b = StateBasis::hermite(K, mu);
  const std::int64_t n = 100000;
  Rng r = Rng::stream(21, 0);
  std::vector<double> acc(static_cast<std::size_t>(K * K), 0.0);
  std::vector<double> v(K);
  for (std::int64_t i = 0; i < n; ++i) {
    double x = mu.sample(0, r);
    b.eval(0, x, v);
    for (int j = 0; j < K; ++j) {
      for (int k = 0; k < K; ++k) {
        acc[static_cast<std::size_t>(j * K + k)] += v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
      }
    }
  }
  double tol = 5.0 * std::sqrt(static_cast<double>(K) / static_cast<double>(n)) *
               b.lambda_bound() * b.lambda_bound();
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      double got = acc[static_cast<std::size_t>(j * K + k)] / static_cast<double>(n);
      CHECK(std::abs(got - (j == k ? 1.0 : 0.0)) <= tol);
    }
  }
}

TEST_CASE("hermite noise basis integrates to zero under the Gaussian law") {
  NoiseLaw law = NoiseLaw::std_gaussian();
  for (int K : {1, 2, 5}) {
    NoiseBasis psi = NoiseBasis::hermite(K);
    CHECK(psi.max_abs_mean(law) <= 1e-12);
  }
}

TEST_CASE("hermite noise covariance is the identity under quadrature") {
  const auto& gh = gauss_hermite(64);
  const int K = 4;
  NoiseBasis psi = NoiseBasis::hermite(K);
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      double cov = gh.integrate([&](double z) {
        auto v = psi.eval(z);
        return v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
      });
      CHECK(std::abs(cov - (j == k ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("indicator state basis is orthonormal by exact summation") {
  auto mu = ReferenceMeasure::finite_uniform({0.0, 1.0, 2.0});
  StateBasis b = StateBasis::indicator(mu);
  CHECK(b.size() == 3);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      double cov = 0.0;
      for (std::size_t e = 0; e < 3; ++e) {
        auto v = b.eval(0, mu.atoms()[e]);
        cov += mu.probs()[e] * v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
      }
      CHECK(cov == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-14));
    }
  }
  // rescaled indicator value at its own atom
  auto v0 = b.eval(0, 1.0);
  CHECK(v0[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(v0[0] == 0.0);
  CHECK_THROWS(b.eval(0, 0.5));
}

TEST_CASE("two-point indicator noise basis is the sign function") {
  NoiseBasis psi = NoiseBasis::indicator(NoiseLaw::two_point());
  CHECK(psi.size() == 1);
  CHECK(psi.eval(-1.0)[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(psi.eval(1.0)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi.max_abs_mean(NoiseLaw::two_point()) <= 1e-12);
}

TEST_CASE("indicator noise basis spans the zero-mean subspace") {
  NoiseLaw law = NoiseLaw::finite({-2.0, 0.0, 1.0, 3.0}, {0.1, 0.4, 0.3, 0.2});
  NoiseBasis psi = NoiseBasis::indicator(law);
  CHECK(psi.size() == 3);
  CHECK(psi.max_abs_mean(law) <= 1e-12);
  // covariance identity by exact summation
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      double cov = 0.0;
      for (std::size_t e = 0; e < law.atoms().size(); ++e) {
        auto v = psi.eval(law.atoms()[e]);
        cov += law.probs()[e] * v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
      }
      CHECK(std::abs(cov - (j == k ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("single-atom noise law is rejected") {
  CHECK_THROWS(NoiseBasis::indicator(NoiseLaw::degenerate(0.0)));
}

TEST_CASE("declared sup and Lipschitz bounds hold on the certified domain") {
  auto mu = ReferenceMeasure::gaussian_schedule(3);
  StateBasis b = StateBasis::hermite(4, mu, 6.0);
  Rng r = Rng::stream(31, 0);
  for (int i = 0; i < 5000; ++i) {
    int h = static_cast<int>(r.uniform01() * 3.0);
    double s = mu.scale(h);
    double x = r.uniform(-6.0 * s, 6.0 * s);
    double y = r.uniform(-6.0 * s, 6.0 * s);
    auto vx = b.eval(h, x);
    auto vy = b.eval(h, y);
    double diff = 0.0;
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(vx[static_cast<std::size_t>(k)]) <= b.lambda_bound() + 1e-12);
      double d = vx[static_cast<std::size_t>(k)] - vy[static_cast<std::size_t>(k)];
      diff += d * d;
    }
    CHECK(std::sqrt(diff) <= b.lipschitz() * std::abs(x - y) + 1e-9);
  }
}

TEST_CASE("reference sampler matches the declared moments") {
  auto mu = ReferenceMeasure::gaussian_schedule(4);
  Rng r = Rng::stream(41, 0);
  const std::int64_t n = 100000;
  for (int h : {0, 3}) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = mu.sample(h, r);
    auto st = mean_and_std_err(xs);
    CHECK(std::abs(st.mean) <= 4.0 * st.std_err);
    double var = 0.0;
    for (double x : xs) var += x * x;
    var /= static_cast<double>(n);
    CHECK(var == doctest::Approx(mu.scale(h) * mu.scale(h)).epsilon(0.05));
  }
}

TEST_CASE("finite uniform blocks cycle with exact frequencies") {
  auto mu = ReferenceMeasure::finite_uniform({0.0, 1.0, 2.0});
  Rng r = Rng::stream(51, 0);
  auto block = mu.sample_block(0, 9, r);
  int counts[3] = {0, 0, 0};
  for (double x : block) counts[static_cast<int>(x)]++;
  CHECK(counts[0] == 3);
  CHECK(counts[1] == 3);
  CHECK(counts[2] == 3);
}

TEST_CASE("density matches the declared Gaussian formula") {
  auto mu = ReferenceMeasure::gaussian_schedule(2);
  const double sqrt_2pi = std::sqrt(8.0 * std::atan(1.0));
  for (int h : {0, 2}) {
    double s = mu.scale(h);
    CHECK(mu.density(h, 0.0) == doctest::Approx(1.0 / (s * sqrt_2pi)).epsilon(1e-12));
    CHECK(mu.density(h, s) ==
          doctest::Approx(std::exp(-0.5) / (s * sqrt_2pi)).epsilon(1e-12));
    // unit mass, integrating f = density / standard-normal-density under N(0,1)
    const auto& gh = gauss_hermite(64);
    double mass = gh.integrate([&](double z) {
      double x = s * z;
      return mu.density(h, x) * s * sqrt_2pi * std::exp(0.5 * z * z);
    });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto fu = ReferenceMeasure::finite_uniform({0.0, 1.0});
  CHECK(fu.density(0, 0.0) == 0.5);
  CHECK(fu.density(0, 0.25) == 0.0);
}

TEST_CASE("sigma_inverse_apply is the identity for shipped families") {
  auto mu = ReferenceMeasure::std_gaussian(2);
  StateBasis b = StateBasis::hermite(3, mu);
  std::vector<double> in{1.0, -2.5, 0.125}, out(3);
  b.sigma_inverse_apply(0, in, out);
  CHECK(out == in);
  NoiseBasis psi = NoiseBasis::hermite(2);
  std::vector<double> nin{0.5, -0.25}, nout(2);
  psi.sigma_inverse_apply(nin, nout);
  CHECK(nout == nin);
}
