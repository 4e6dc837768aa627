#include "mdpb/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdpb {

namespace {
constexpr std::uint64_t kTagGridScatter = 0x9F2;
}  // namespace

void GridInterpolant::validate() const {
  if (points.empty()) throw std::invalid_argument("GridInterpolant: no points");
  if (points.size() != values.size()) {
    throw std::invalid_argument("GridInterpolant: points/values size mismatch");
  }
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("GridInterpolant: negative constant");
}

double GridInterpolant::lower_envelope(double x, double a) const {
  validate();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < points.size(); ++l) {
    double rho = metric.joint(x, a, points[l].first, points[l].second);
    best = std::max(best, values[l] - lipschitz * rho);
  }
  return best;
}

double GridInterpolant::upper_envelope(double x, double a) const {
  validate();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < points.size(); ++l) {
    double rho = metric.joint(x, a, points[l].first, points[l].second);
    best = std::min(best, values[l] + lipschitz * rho);
  }
  return best;
}

double GridInterpolant::operator()(double x, double a) const {
  if (exact_lookup) {
    validate();
    for (std::size_t l = 0; l < points.size(); ++l) {
      if (metric.joint(x, a, points[l].first, points[l].second) <= 1e-9) {
        return values[l];
      }
    }
    throw std::invalid_argument("GridInterpolant: off-grid query in lookup mode");
  }
  return central_interpolate(*this, x, a);
}

double central_interpolate(const GridInterpolant& g, double x, double a) {
  g.validate();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < g.points.size(); ++l) {
    double rho = g.metric.joint(x, a, g.points[l].first, g.points[l].second);
    lo = std::max(lo, g.values[l] - g.lipschitz * rho);
    hi = std::min(hi, g.values[l] + g.lipschitz * rho);
  }
  return 0.5 * (lo + hi);
}

std::vector<double> space_grid(const SpaceDesc& space, int points, bool random,
                               std::uint64_t seed) {
  if (space.is_finite()) return space.values();
  if (points < 1) throw std::invalid_argument("space_grid: points < 1");
  if (random) {
    Rng r = Rng::stream(seed, kTagGridScatter);
    std::vector<double> xs(points);
    for (double& x : xs) x = r.uniform(space.lo(), space.hi());
    std::sort(xs.begin(), xs.end());
    return xs;
  }
  return SpaceDesc::box(space.lo(), space.hi(), points).eval_points();
}

double max_slope(std::span<const std::pair<double, double>> points,
                 std::span<const double> values, const ProductMetric& metric) {
  if (points.size() != values.size()) {
    throw std::invalid_argument("max_slope: points/values size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double rho = metric.joint(points[i].first, points[i].second, points[j].first,
                                points[j].second);
      if (rho > 0.0) {
        worst = std::max(worst, std::abs(values[i] - values[j]) / rho);
      }
    }
  }
  return worst;
}

double covering_radius(std::span<const std::pair<double, double>> grid,
                       std::span<const std::pair<double, double>> probe,
                       const ProductMetric& metric) {
  if (grid.empty()) throw std::invalid_argument("covering_radius: empty grid");
  double worst = 0.0;
  for (const auto& p : probe) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& q : grid) {
      nearest = std::min(nearest, metric.joint(p.first, p.second, q.first, q.second));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace mdpb
