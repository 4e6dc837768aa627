#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpb/score.hpp"
#include "mdpb/testbeds.hpp"

using namespace mdpb;

namespace {

MdpModel unit_shift_model() {
  // next state x + eps with standard normal eps: the conditional density
  // is N(x, 1), so the score members reduce to their textbook forms
  MdpModel m;
  m.name = "unit-shift";
  m.horizon = 2;
  m.states = SpaceDesc::box(-8.0, 8.0, 5);
  m.actions = SpaceDesc::box(-1.0, 1.0, 3);
  m.noise = NoiseLaw::std_gaussian();
  m.kernel = [](int, double x, double, double eps) { return x + eps; };
  m.reward = [](int, double, double) { return 0.0; };
  m.terminal = [](double) { return 0.0; };
  m.r_max = 1.0;
  m.lip_reward = 0.0;
  m.lip_kernel = 1.0;
  return m;
}

}  // namespace

TEST_CASE("members match their closed forms") {
  ScoreFamily fam(ConditionalGaussian{.delta = 0.0, .sigma = 0.5}, 3);
  for (double z : {-1.3, -0.2, 0.0, 0.4, 2.1}) {
    auto f = fam.eval(z);
    REQUIRE(f.size() == 3);
    double env = std::exp(-0.25 * z * z);
    CHECK(f[0] == doctest::Approx(-z / 0.5).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(-1.5 * z * env / 0.5).epsilon(1e-14));
    CHECK(f[2] == doctest::Approx((1.0 - 1.5 * z * z) * env / 0.5).epsilon(1e-14));
  }
}

TEST_CASE("every member integrates to zero under the standard normal") {
  for (int size : {1, 2, 3, 4, 6}) {
    ScoreFamily fam(ConditionalGaussian{.delta = 0.2, .sigma = 0.4}, size);
    CHECK(fam.max_abs_mean() <= 1e-8);
    CHECK(fam.max_abs_mean() <= 1e-12);  // quadrature leaves far more margin
  }
}

TEST_CASE("fitting a linear value recovers the negated score coefficient") {
  MdpModel m = unit_shift_model();
  ScoreFamily fam(ConditionalGaussian{.delta = 0.0, .sigma = 1.0}, 3);
  auto v = [](double y) { return y; };
  auto block = dual_noise_block(m.noise, 1, 1 << 12, 21);
  // at x = 0 the target y = eps is -1 times the first member (-z); it is
  // exactly representable, so the ridge is the only bias
  ScoreFit fit = fit_score_coeffs(m, fam, v, 1, 0.0, 0.0, block);
  REQUIRE_FALSE(fit.degenerate);
  CHECK(std::abs(fit.coeff[0] + 1.0) <= 1e-6);
  CHECK(std::abs(fit.coeff[1]) <= 1e-6);
  CHECK(std::abs(fit.coeff[2]) <= 1e-6);
  // away from 0 the target keeps a constant part outside the mean-zero
  // span; it leaks into the fit at the O(x / sqrt(M)) scale, no worse
  ScoreFit off = fit_score_coeffs(m, fam, v, 1, 0.3, 0.0, block);
  CHECK(std::abs(off.coeff[0] + 1.0) <= 0.05);
  CHECK(std::abs(off.coeff[1]) <= 0.05);
  CHECK(std::abs(off.coeff[2]) <= 0.05);
}

TEST_CASE("undamped rank-deficient systems report degeneracy") {
  MdpModel m = unit_shift_model();
  ScoreFamily fam(ConditionalGaussian{.delta = 0.0, .sigma = 1.0}, 2);
  auto v = [](double y) { return y; };
  auto block = dual_noise_block(m.noise, 1, 1, 3);  // one draw, two members
  ScoreFit bare = fit_score_coeffs(m, fam, v, 1, 0.0, 0.0, block, 0.0);
  CHECK(bare.degenerate);
  CHECK(bare.coeff == std::vector<double>{0.0, 0.0});
  // the default ridge keeps the same system solvable
  ScoreFit ridged = fit_score_coeffs(m, fam, v, 1, 0.0, 0.0, block);
  CHECK_FALSE(ridged.degenerate);
}

TEST_CASE("assembled penalties reproduce the exactly representable target") {
  MdpModel m = unit_shift_model();
  ScoreFamily fam(ConditionalGaussian{.delta = 0.0, .sigma = 1.0}, 2);
  auto value = [](int, double y) { return y; };
  ScoreBuildOptions opt;
  opt.sample_size = 1 << 12;
  opt.state_points = 5;
  ScoreMartingale sm = build_score_martingale(m, value, fam, 77, opt);
  CHECK(sm.degenerate_fits() == 0);
  // fitted penalty tracks y - E[y | x] = eps up to the ridge bias
  for (double eps : {-1.7, -0.3, 0.0, 0.9, 2.2}) {
    CHECK(sm.penalty(1, 0.0, 0.0, eps) == doctest::Approx(eps).epsilon(1e-4));
  }
}

TEST_CASE("builder output is consistent with the pointwise fit") {
  MdpModel m = make_drift1d({.horizon = 3, .box = 4.0, .action_grid = 3});
  ConditionalGaussian law = drift1d_density({.horizon = 3, .box = 4.0, .action_grid = 3});
  ScoreFamily fam(law, 3);
  auto value = [](int, double y) { return std::exp(-0.5 * y * y); };
  ScoreBuildOptions opt;
  opt.sample_size = 256;
  opt.state_points = 5;
  ScoreMartingale sm = build_score_martingale(m, value, fam, 5, opt);

  const auto& g0 = sm.coefficients()[1][0];
  auto [x, a] = g0.points[3];
  auto block = dual_noise_block(m.noise, 2, 256, 5);
  auto v2 = [&value](double y) { return value(2, y); };
  ScoreFit fit = fit_score_coeffs(m, fam, v2, 2, x, a, block, opt.damping);
  auto f = fam.eval(0.37);
  double want = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) want += fit.coeff[j] * f[j];
  CHECK(sm.penalty(2, x, a, 0.37) == doctest::Approx(want).epsilon(1e-13));

  // grids reproduce their own data under the max-slope constant
  for (const auto& row : sm.coefficients()) {
    for (const auto& g : row) {
      for (std::size_t l = 0; l < g.points.size(); ++l) {
        CHECK(central_interpolate(g, g.points[l].first, g.points[l].second) ==
              doctest::Approx(g.values[l]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("penalties keep a quadrature-zero conditional mean") {
  MdpModel m = make_drift1d({.horizon = 3, .box = 4.0, .action_grid = 5});
  ScoreFamily fam(drift1d_density({.horizon = 3, .box = 4.0}), 4);
  auto value = [](int, double y) { return std::exp(-0.5 * y * y); };
  ScoreBuildOptions opt;
  opt.sample_size = 128;
  opt.state_points = 7;
  ScoreMartingale sm = build_score_martingale(m, value, fam, 13, opt);
  for (int t = 1; t <= 3; ++t) {
    for (double x : {-2.0, 0.0, 1.0}) {
      for (double a : {-1.0, 0.0, 1.0}) {
        double mean =
            m.noise.expect([&](double e) { return sm.penalty(t, x, a, e); });
        CHECK(std::abs(mean) <= 1e-10);
      }
    }
  }
}

TEST_CASE("construction rejects unusable inputs") {
  CHECK_THROWS_AS(ScoreFamily(ConditionalGaussian{.sigma = 0.0}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScoreFamily(ConditionalGaussian{}, 0), std::invalid_argument);

  // non-Gaussian driving noise has no standardized displacement
  MdpModel chain = make_chain3();
  ScoreFamily fam(ConditionalGaussian{}, 2);
  auto value = [](int, double y) { return y; };
  CHECK_THROWS_AS(build_score_martingale(chain, value, fam, 1, {}),
                  std::invalid_argument);

  MdpModel m = unit_shift_model();
  ScoreBuildOptions opt;
  opt.sample_size = 16;
  ScoreMartingale sm = build_score_martingale(m, value, fam, 1, opt);
  CHECK_THROWS(sm.penalty(0, 0.0, 0.0, 0.0));
  CHECK_THROWS(sm.penalty(3, 0.0, 0.0, 0.0));

  PenaltyFn f = sm.as_penalty();
  CHECK(f(1, 0.5, 0.0, 0.3) == sm.penalty(1, 0.5, 0.0, 0.3));
}
