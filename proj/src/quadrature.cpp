#include "mdpb/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mdpb {

namespace {

// Orthonormal probabilists' Hermite polynomials:
//   p0 = 1, p1 = z, p_{k+1} = (z p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
// Values stay O(1) near the real roots, so n = 64 is safe in doubles.
double hermite_p(int n, double z, double* dp = nullptr) {
  double pm1 = 0.0, p = 1.0;
  for (int k = 0; k < n; ++k) {
    double pn = (z * p - std::sqrt(static_cast<double>(k)) * pm1) /
                std::sqrt(static_cast<double>(k + 1));
    pm1 = p;
    p = pn;
  }
  if (dp) *dp = std::sqrt(static_cast<double>(n)) * pm1;  // p_n' = sqrt(n) p_{n-1}
  return p;
}

// Roots by interlacing: the roots of p_m separate those of p_{m+1}, so each
// level yields sign-change brackets for the next.  Bisection then Newton.
std::vector<double> hermite_roots(int n) {
  std::vector<double> roots{};
  for (int m = 1; m <= n; ++m) {
    double bound = std::sqrt(4.0 * m + 2.0);
    std::vector<double> brackets;
    brackets.push_back(-bound);
    for (double r : roots) brackets.push_back(r);
    brackets.push_back(bound);

    std::vector<double> next;
    next.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      double lo = brackets[static_cast<std::size_t>(j)];
      double hi = brackets[static_cast<std::size_t>(j) + 1];
      double flo = hermite_p(m, lo);
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = hermite_p(m, mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double z = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {
        double dp;
        double p = hermite_p(m, z, &dp);
        if (dp != 0.0) z -= p / dp;
      }
      next.push_back(z);
    }
    roots = std::move(next);
  }
  return roots;
}

GaussHermite build_rule(int n) {
  GaussHermite rule;
  rule.nodes = hermite_roots(n);
  rule.weights.resize(static_cast<std::size_t>(n));
  // Christoffel numbers: w_i = 1 / sum_{k<n} p_k(z_i)^2; they add to 1.
  for (int i = 0; i < n; ++i) {
    double z = rule.nodes[static_cast<std::size_t>(i)];
    double pm1 = 0.0, p = 1.0, s = 1.0;
    for (int k = 0; k < n - 1; ++k) {
      double pn = (z * p - std::sqrt(static_cast<double>(k)) * pm1) /
                  std::sqrt(static_cast<double>(k + 1));
      pm1 = p;
      p = pn;
      s += p * p;
    }
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / s;
  }
  // Enforce exact symmetry of the rule.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    double z = 0.5 * (rule.nodes[static_cast<std::size_t>(i)] -
                      rule.nodes[static_cast<std::size_t>(j)]);
    rule.nodes[static_cast<std::size_t>(i)] = z;
    rule.nodes[static_cast<std::size_t>(j)] = -z;
    double w = 0.5 * (rule.weights[static_cast<std::size_t>(i)] +
                      rule.weights[static_cast<std::size_t>(j)]);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(j)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_hermite: n outside [1,256]");
  static std::map<int, GaussHermite> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace mdpb
