#include "mdpb/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdpb/quadrature.hpp"

namespace mdpb {

SpaceDesc SpaceDesc::finite(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("SpaceDesc: empty finite space");
  if (!std::is_sorted(values.begin(), values.end())) {
    throw std::invalid_argument("SpaceDesc: finite values must be ascending");
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] == values[i - 1]) {
      throw std::invalid_argument("SpaceDesc: duplicate value in finite space");
    }
  }
  SpaceDesc s;
  s.v_ = FiniteSpace{std::move(values)};
  return s;
}

SpaceDesc SpaceDesc::box(double lo, double hi, int eval_grid) {
  if (!(lo < hi)) throw std::invalid_argument("SpaceDesc: box requires lo < hi");
  if (eval_grid < 1) throw std::invalid_argument("SpaceDesc: eval_grid < 1");
  SpaceDesc s;
  s.v_ = BoxSpace{lo, hi, eval_grid};
  return s;
}

const std::vector<double>& SpaceDesc::values() const {
  const auto* f = std::get_if<FiniteSpace>(&v_);
  if (!f) throw std::logic_error("SpaceDesc: values() on a box space");
  return f->values;
}

double SpaceDesc::lo() const {
  if (const auto* f = std::get_if<FiniteSpace>(&v_)) return f->values.front();
  return std::get<BoxSpace>(v_).lo;
}

double SpaceDesc::hi() const {
  if (const auto* f = std::get_if<FiniteSpace>(&v_)) return f->values.back();
  return std::get<BoxSpace>(v_).hi;
}

std::vector<double> SpaceDesc::eval_points() const {
  if (const auto* f = std::get_if<FiniteSpace>(&v_)) return f->values;
  const auto& b = std::get<BoxSpace>(v_);
  std::vector<double> pts(static_cast<std::size_t>(b.eval_grid));
  if (b.eval_grid == 1) {
    pts[0] = 0.5 * (b.lo + b.hi);
    return pts;
  }
  for (int i = 0; i < b.eval_grid; ++i) {
    pts[static_cast<std::size_t>(i)] =
        b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(b.eval_grid - 1);
  }
  return pts;
}

bool SpaceDesc::contains(double x, double tol) const {
  if (const auto* f = std::get_if<FiniteSpace>(&v_)) {
    for (double v : f->values) {
      if (std::abs(x - v) <= tol) return true;
    }
    return false;
  }
  const auto& b = std::get<BoxSpace>(v_);
  return x >= b.lo - tol && x <= b.hi + tol;
}

int SpaceDesc::index_of(double x, double tol) const {
  const auto* f = std::get_if<FiniteSpace>(&v_);
  if (!f) throw std::logic_error("SpaceDesc: index_of() on a box space");
  int best = -1;
  double best_d = tol;
  for (std::size_t i = 0; i < f->values.size(); ++i) {
    double d = std::abs(x - f->values[i]);
    if (d <= best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::size_t SpaceDesc::size() const { return values().size(); }

// ---------------------------------------------------------------------

NoiseLaw NoiseLaw::finite(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw std::invalid_argument("NoiseLaw: atoms/probs size mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw std::invalid_argument("NoiseLaw: probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("NoiseLaw: probabilities must sum to 1");
  }
  NoiseLaw law;
  law.atoms_ = std::move(atoms);
  law.probs_ = std::move(probs);
  law.cum_.resize(law.probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < law.probs_.size(); ++i) {
    acc += law.probs_[i];
    law.cum_[i] = acc;
  }
  law.cum_.back() = 1.0;
  return law;
}

NoiseLaw NoiseLaw::two_point() { return finite({-1.0, 1.0}, {0.5, 0.5}); }

NoiseLaw NoiseLaw::degenerate(double atom) { return finite({atom}, {1.0}); }

NoiseLaw NoiseLaw::std_gaussian() {
  NoiseLaw law;
  law.gaussian_ = true;
  return law;
}

const std::vector<double>& NoiseLaw::atoms() const {
  if (gaussian_) throw std::logic_error("NoiseLaw: atoms() on the Gaussian law");
  return atoms_;
}

const std::vector<double>& NoiseLaw::probs() const {
  if (gaussian_) throw std::logic_error("NoiseLaw: probs() on the Gaussian law");
  return probs_;
}

double NoiseLaw::sample(Rng& rng) const {
  if (gaussian_) return rng.gaussian();
  if (atoms_.size() == 1) return atoms_[0];
  double u = rng.uniform01();
  for (std::size_t i = 0; i + 1 < cum_.size(); ++i) {
    if (u < cum_[i]) return atoms_[i];
  }
  return atoms_.back();
}

double NoiseLaw::expect(const std::function<double(double)>& f) const {
  if (gaussian_) return gauss_hermite(64).integrate(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) acc += probs_[i] * f(atoms_[i]);
  return acc;
}

}  // namespace mdpb
