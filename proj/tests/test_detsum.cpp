#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpb/detsum.hpp"
#include "mdpb/rng.hpp"

using namespace mdpb;

TEST_CASE("compensated sum survives cancellation") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}

TEST_CASE("accumulate_terms is exact against a long-double reference") {
  Rng r = Rng::stream(3, 0);
  const std::int64_t n = 50000;
  std::vector<double> terms(n);
  long double ref = 0.0L;
  for (auto& t : terms) {
    t = r.uniform(-1.0, 1.0) * std::pow(10.0, r.uniform(-8.0, 8.0));
  }
  for (double t : terms) ref += static_cast<long double>(t);
  double out = 0.0;
  accumulate_terms(
      n, 1, 1, [&](std::int64_t i, std::span<double> o) { o[0] = terms[static_cast<std::size_t>(i)]; },
      std::span<double>(&out, 1));
  CHECK(std::abs(out - static_cast<double>(ref)) <= 1e-6 * std::abs(static_cast<double>(ref)) + 1e-12);
}

TEST_CASE("reductions are invariant under thread count") {
  const std::int64_t n = 100000;
  auto term = [](std::int64_t i, std::span<double> o) {
    Rng r = Rng::stream(11, static_cast<std::uint64_t>(i));
    o[0] = r.gaussian();
    o[1] = o[0] * o[0];
  };
  std::vector<double> r1(2), r2(2), r8(2);
  accumulate_terms(n, 2, 1, term, r1);
  accumulate_terms(n, 2, 2, term, r2);
  accumulate_terms(n, 2, 8, term, r8);
  CHECK(r1[0] == r2[0]);
  CHECK(r1[0] == r8[0]);
  CHECK(r1[1] == r2[1]);
  CHECK(r1[1] == r8[1]);
}

TEST_CASE("parallel_for covers every index exactly once") {
  const std::int64_t n = 20000;
  std::vector<int> hits(n, 0);
  parallel_for(n, 4, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("mean_and_std_err basics") {
  std::vector<double> xs{1.0, 1.0, 1.0};
  auto st = mean_and_std_err(xs);
  CHECK(st.mean == 1.0);
  CHECK(st.std_err == 0.0);

  std::vector<double> ys{0.0, 2.0};
  auto st2 = mean_and_std_err(ys);
  CHECK(st2.mean == 1.0);
  CHECK(st2.std_err == doctest::Approx(1.0));  // sd = sqrt(2), se = sd/sqrt(2)

  std::vector<double> one{5.0};
  CHECK(mean_and_std_err(one).std_err == 0.0);
}
