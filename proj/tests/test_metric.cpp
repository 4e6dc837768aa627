#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpb/metric.hpp"
#include "mdpb/rng.hpp"

using namespace mdpb;

// Metric axioms checked on random triples for every combiner.
TEST_CASE("product metric satisfies the metric axioms") {
  for (auto comb : {ProductMetric::Combine::Sum, ProductMetric::Combine::Max,
                    ProductMetric::Combine::Euclid}) {
    ProductMetric m;
    m.combine = comb;
    Rng r = Rng::stream(17, static_cast<std::uint64_t>(comb));
    for (int i = 0; i < 2000; ++i) {
      double x1 = r.uniform(-5, 5), a1 = r.uniform(-2, 2);
      double x2 = r.uniform(-5, 5), a2 = r.uniform(-2, 2);
      double x3 = r.uniform(-5, 5), a3 = r.uniform(-2, 2);
      double d12 = m.joint(x1, a1, x2, a2);
      double d21 = m.joint(x2, a2, x1, a1);
      double d13 = m.joint(x1, a1, x3, a3);
      double d23 = m.joint(x2, a2, x3, a3);
      CHECK(d12 >= 0.0);
      CHECK(d12 == d21);
      CHECK(d13 <= d12 + d23 + 1e-12);
      CHECK(m.joint(x1, a1, x1, a1) == 0.0);
    }
  }
}

TEST_CASE("identity of indiscernibles") {
  ProductMetric m;
  CHECK(m.joint(1.0, 2.0, 1.0, 2.0) == 0.0);
  CHECK(m.joint(1.0, 2.0, 1.0, 2.5) > 0.0);
  CHECK(m.joint(1.0, 2.0, 1.5, 2.0) > 0.0);
}

TEST_CASE("combiners order as expected") {
  ProductMetric sum, mx, eu;
  sum.combine = ProductMetric::Combine::Sum;
  mx.combine = ProductMetric::Combine::Max;
  eu.combine = ProductMetric::Combine::Euclid;
  double a = sum.joint(0, 0, 3, 4);
  double b = eu.joint(0, 0, 3, 4);
  double c = mx.joint(0, 0, 3, 4);
  CHECK(a == 7.0);
  CHECK(b == 5.0);
  CHECK(c == 4.0);
  CHECK(c <= b);
  CHECK(b <= a);
}
