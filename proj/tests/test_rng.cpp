#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mdpb/detsum.hpp"
#include "mdpb/rng.hpp"

using namespace mdpb;

TEST_CASE("streams replay bit-identically for equal addresses") {
  Rng a = Rng::stream(42, 7, 3, 1);
  Rng b = Rng::stream(42, 7, 3, 1);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct addresses give distinct streams") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) {
    for (std::uint64_t k = 0; k < 64; ++k) {
      firsts.insert(Rng::stream(s, k).next_u64());
    }
  }
  CHECK(firsts.size() == 64 * 64);
}

TEST_CASE("uniform draws match first two moments") {
  Rng r = Rng::stream(1, 0);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = r.uniform01();
  auto st = mean_and_std_err(xs);
  CHECK(std::abs(st.mean - 0.5) <= 4.0 * st.std_err);
  double var = 0.0;
  for (double x : xs) var += (x - st.mean) * (x - st.mean);
  var /= n - 1;
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("inverse normal cdf hits tabulated quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.841344746068543) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.0013498980316300945) == doctest::Approx(-3.0).epsilon(1e-12));
  // round trip through the exact CDF
  for (double u : {1e-9, 1e-4, 0.2, 0.5, 0.77, 1.0 - 1e-5}) {
    double z = inverse_normal_cdf(u);
    double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(back == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("gaussian draws match first two moments") {
  Rng r = Rng::stream(9, 1);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = r.gaussian();
  auto st = mean_and_std_err(xs);
  CHECK(std::abs(st.mean) <= 4.0 * st.std_err);
  double var = 0.0;
  for (double x : xs) var += x * x;
  var /= n;
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
