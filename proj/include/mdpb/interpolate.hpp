#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mdpb/metric.hpp"
#include "mdpb/spaces.hpp"

namespace mdpb {

// =====================================================================
// Central Lipschitz interpolation on scattered grids
// =====================================================================
//
// From values f_l at points p_l and a constant L, the envelopes
//
//   lower(p) = max_l ( f_l - L rho(p, p_l) )
//   upper(p) = min_l ( f_l + L rho(p, p_l) )
//
// bracket every L-Lipschitz extension of the data; their midpoint is the
// minimax-optimal extension, off the data by at most L times the covering
// radius of the grid.

struct GridInterpolant {
  std::vector<std::pair<double, double>> points;  // (state, action)
  std::vector<double> values;
  double lipschitz = 1.0;
  ProductMetric metric;

  // When the grid enumerates a whole finite domain there is nothing to
  // interpolate: evaluation becomes exact table lookup and off-grid
  // queries are rejected.
  bool exact_lookup = false;

  double lower_envelope(double x, double a) const;
  double upper_envelope(double x, double a) const;
  double operator()(double x, double a) const;

  void validate() const;  // sizes match, nonempty, L >= 0
};

// Envelope midpoint at (x, a); ignores exact_lookup.
double central_interpolate(const GridInterpolant& g, double x, double a);

// sup over probe points of the distance to the nearest grid point.  The
// probe stands in for the continuous domain; pass the grid itself for
// fully enumerated finite domains (radius 0).
double covering_radius(std::span<const std::pair<double, double>> grid,
                       std::span<const std::pair<double, double>> probe,
                       const ProductMetric& metric);

// One-dimensional fitting grid: finite spaces enumerate their values,
// boxes take a uniform lattice of the requested size or a sorted uniform
// scatter when random is set.
std::vector<double> space_grid(const SpaceDesc& space, int points,
                               bool random = false, std::uint64_t seed = 0);

// Largest pairwise difference quotient of scattered data: the smallest
// constant whose central interpolant reproduces the data exactly.  Zero
// when no pair is separated.
double max_slope(std::span<const std::pair<double, double>> points,
                 std::span<const double> values, const ProductMetric& metric);

}  // namespace mdpb
