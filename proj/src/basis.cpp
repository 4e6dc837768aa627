#include "mdpb/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdpb {

namespace {

constexpr double kAtomTol = 1e-9;

// Orthonormal probabilists' Hermite values p_0..p_{n-1} at z.
void hermite_values(int n, double z, std::span<double> out) {
  out[0] = 1.0;
  if (n == 1) return;
  out[1] = z;
  for (int k = 1; k + 1 < n; ++k) {
    out[static_cast<std::size_t>(k) + 1] =
        (z * out[static_cast<std::size_t>(k)] -
         std::sqrt(static_cast<double>(k)) * out[static_cast<std::size_t>(k) - 1]) /
        std::sqrt(static_cast<double>(k + 1));
  }
}

int match_atom(const std::vector<double>& atoms, double x) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (std::abs(atoms[i] - x) <= kAtomTol) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

// ---------------------------------------------------------------------
// ReferenceMeasure

ReferenceMeasure ReferenceMeasure::gaussian_schedule(int horizon, double alpha) {
  if (horizon < 1) throw std::invalid_argument("ReferenceMeasure: horizon < 1");
  if (alpha <= 0.0) alpha = static_cast<double>(horizon);
  ReferenceMeasure mu;
  mu.horizon_ = horizon;
  mu.scales_.resize(static_cast<std::size_t>(horizon) + 1);
  for (int h = 0; h <= horizon; ++h) {
    mu.scales_[static_cast<std::size_t>(h)] =
        std::sqrt(static_cast<double>(h + 1) / (2.0 * alpha));
  }
  return mu;
}

ReferenceMeasure ReferenceMeasure::std_gaussian(int horizon) {
  if (horizon < 1) throw std::invalid_argument("ReferenceMeasure: horizon < 1");
  ReferenceMeasure mu;
  mu.horizon_ = horizon;
  mu.scales_.assign(static_cast<std::size_t>(horizon) + 1, 1.0);
  return mu;
}

ReferenceMeasure ReferenceMeasure::finite_uniform(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ReferenceMeasure: no atoms");
  ReferenceMeasure mu;
  mu.finite_ = true;
  mu.probs_.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  mu.atoms_ = std::move(values);
  return mu;
}

double ReferenceMeasure::mean(int) const {
  if (finite_) throw std::logic_error("ReferenceMeasure: mean() on a finite measure");
  return 0.0;
}

double ReferenceMeasure::scale(int h) const {
  if (finite_) throw std::logic_error("ReferenceMeasure: scale() on a finite measure");
  if (h < 0 || h >= static_cast<int>(scales_.size())) {
    throw std::invalid_argument("ReferenceMeasure: stage out of range");
  }
  return scales_[static_cast<std::size_t>(h)];
}

const std::vector<double>& ReferenceMeasure::atoms() const {
  if (!finite_) throw std::logic_error("ReferenceMeasure: atoms() on a continuous measure");
  return atoms_;
}

const std::vector<double>& ReferenceMeasure::probs() const {
  if (!finite_) throw std::logic_error("ReferenceMeasure: probs() on a continuous measure");
  return probs_;
}

double ReferenceMeasure::sample(int h, Rng& rng) const {
  if (finite_) {
    std::size_t i =
        static_cast<std::size_t>(rng.uniform01() * static_cast<double>(atoms_.size()));
    return atoms_[std::min(i, atoms_.size() - 1)];
  }
  return scale(h) * rng.gaussian();
}

std::vector<double> ReferenceMeasure::sample_block(int h, std::int64_t n, Rng& rng) const {
  if (n < 1) throw std::invalid_argument("ReferenceMeasure: block size < 1");
  std::vector<double> xs(static_cast<std::size_t>(n));
  if (finite_) {
    for (std::int64_t i = 0; i < n; ++i) {
      xs[static_cast<std::size_t>(i)] =
          atoms_[static_cast<std::size_t>(i) % atoms_.size()];
    }
    return xs;
  }
  double s = scale(h);
  for (auto& x : xs) x = s * rng.gaussian();
  return xs;
}

double ReferenceMeasure::density(int h, double x) const {
  if (finite_) {
    int i = match_atom(atoms_, x);
    return i < 0 ? 0.0 : probs_[static_cast<std::size_t>(i)];
  }
  double s = scale(h);
  double z = x / s;
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(8.0 * std::atan(1.0));
  return inv_sqrt_2pi / s * std::exp(-0.5 * z * z);
}

// ---------------------------------------------------------------------
// StateBasis

StateBasis StateBasis::hermite(int size, const ReferenceMeasure& mu,
                               double domain_bound) {
  if (size < 1) throw std::invalid_argument("StateBasis: size < 1");
  if (mu.is_finite()) {
    throw std::invalid_argument("StateBasis: hermite needs a continuous measure");
  }
  if (!(domain_bound > 0.0)) throw std::invalid_argument("StateBasis: domain_bound <= 0");
  StateBasis b;
  b.size_ = size;
  b.domain_bound_ = domain_bound;
  b.means_.assign(static_cast<std::size_t>(mu.horizon()) + 1, 0.0);
  b.scales_.resize(static_cast<std::size_t>(mu.horizon()) + 1);
  double min_scale = 1e300;
  for (int h = 0; h <= mu.horizon(); ++h) {
    b.scales_[static_cast<std::size_t>(h)] = mu.scale(h);
    min_scale = std::min(min_scale, mu.scale(h));
  }

  // Certify sup bounds on the standardized domain by a fine scan; both
  // sup |p_k| and sup ||p'|| are attained at the endpoint for Hermite
  // systems, the scan keeps that fact out of the trust base.
  const int grid = 4001;
  std::vector<double> vals(static_cast<std::size_t>(size) + 1);
  double lam = 0.0, dnorm = 0.0;
  for (int g = 0; g < grid; ++g) {
    double z = -domain_bound + 2.0 * domain_bound * g / (grid - 1);
    hermite_values(size + 1, z, vals);
    for (int k = 0; k < size; ++k) {
      lam = std::max(lam, std::abs(vals[static_cast<std::size_t>(k)]));
    }
    double d2 = 0.0;
    for (int k = 1; k < size; ++k) {  // p_k' = sqrt(k) p_{k-1}
      double dk = std::sqrt(static_cast<double>(k)) * vals[static_cast<std::size_t>(k) - 1];
      d2 += dk * dk;
    }
    dnorm = std::max(dnorm, std::sqrt(d2));
  }
  b.lambda_ = lam;
  b.lipschitz_ = dnorm / min_scale;
  b.second_moment_ = static_cast<double>(size);
  return b;
}

StateBasis StateBasis::indicator(const ReferenceMeasure& mu) {
  if (!mu.is_finite()) {
    throw std::invalid_argument("StateBasis: indicator needs a finite measure");
  }
  for (double p : mu.probs()) {
    if (!(p > 0.0)) throw std::invalid_argument("StateBasis: zero-probability atom");
  }
  StateBasis b;
  b.indicator_ = true;
  b.size_ = static_cast<int>(mu.atoms().size());
  b.atoms_ = mu.atoms();
  b.probs_ = mu.probs();
  double lam = 0.0;
  for (double p : b.probs_) lam = std::max(lam, 1.0 / std::sqrt(p));
  b.lambda_ = lam;
  // Lipschitz against the embedded-value metric: worst pair slope.
  double lip = 0.0;
  for (std::size_t i = 0; i < b.atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < b.atoms_.size(); ++j) {
      double gap = std::abs(b.atoms_[i] - b.atoms_[j]);
      double diff = std::sqrt(1.0 / b.probs_[i] + 1.0 / b.probs_[j]);
      if (gap > 0.0) lip = std::max(lip, diff / gap);
    }
  }
  b.lipschitz_ = lip;
  b.second_moment_ = static_cast<double>(b.size_);
  return b;
}

void StateBasis::eval(int h, double x, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size_) {
    throw std::invalid_argument("StateBasis: bad output span");
  }
  if (indicator_) {
    int i = match_atom(atoms_, x);
    if (i < 0) throw std::invalid_argument("StateBasis: point is not a declared atom");
    std::fill(out.begin(), out.end(), 0.0);
    out[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(probs_[static_cast<std::size_t>(i)]);
    return;
  }
  if (h < 0 || h >= static_cast<int>(scales_.size())) {
    throw std::invalid_argument("StateBasis: stage out of range");
  }
  double z = (x - means_[static_cast<std::size_t>(h)]) / scales_[static_cast<std::size_t>(h)];
  hermite_values(size_, z, out);
}

std::vector<double> StateBasis::eval(int h, double x) const {
  std::vector<double> out(static_cast<std::size_t>(size_));
  eval(h, x, out);
  return out;
}

void StateBasis::sigma_inverse_apply(int, std::span<const double> in,
                                     std::span<double> out) const {
  if (in.size() != out.size() || static_cast<int>(in.size()) != size_) {
    throw std::invalid_argument("StateBasis: bad span size");
  }
  std::copy(in.begin(), in.end(), out.begin());
}

// ---------------------------------------------------------------------
// NoiseBasis

NoiseBasis NoiseBasis::hermite(int size, double domain_bound) {
  if (size < 1) throw std::invalid_argument("NoiseBasis: size < 1");
  if (!(domain_bound > 0.0)) throw std::invalid_argument("NoiseBasis: domain_bound <= 0");
  NoiseBasis b;
  b.size_ = size;
  b.domain_bound_ = domain_bound;
  const int grid = 4001;
  std::vector<double> vals(static_cast<std::size_t>(size) + 1);
  double lam = 0.0;
  for (int g = 0; g < grid; ++g) {
    double z = -domain_bound + 2.0 * domain_bound * g / (grid - 1);
    hermite_values(size + 1, z, vals);
    for (int k = 1; k <= size; ++k) {
      lam = std::max(lam, std::abs(vals[static_cast<std::size_t>(k)]));
    }
  }
  b.lambda_ = lam;
  b.second_moment_ = static_cast<double>(size);
  return b;
}

NoiseBasis NoiseBasis::indicator(const NoiseLaw& law) {
  if (!law.enumerable()) {
    throw std::invalid_argument("NoiseBasis: indicator needs a finite law");
  }
  const auto& atoms = law.atoms();
  const auto& probs = law.probs();
  std::size_t n = atoms.size();
  if (n < 2) {
    throw std::invalid_argument(
        "NoiseBasis: a single-atom law has no nonconstant zero-mean function");
  }
  NoiseBasis b;
  b.indicator_ = true;
  b.size_ = static_cast<int>(n) - 1;
  b.atoms_ = atoms;

  // Centered indicators of atoms 1..n-1, Gram-Schmidt under the law's
  // inner product.  The result spans the zero-mean subspace exactly and
  // has identity covariance.
  auto dot = [&](const std::vector<double>& f, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t e = 0; e < n; ++e) s += probs[e] * f[e] * g[e];
    return s;
  };
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<double> f(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) f[e] = (e == j ? 1.0 : 0.0) - probs[j];
    for (const auto& r : rows) {
      double c = dot(f, r);
      for (std::size_t e = 0; e < n; ++e) f[e] -= c * r[e];
    }
    double nrm = std::sqrt(dot(f, f));
    if (!(nrm > 1e-14)) throw std::runtime_error("NoiseBasis: degenerate atom system");
    for (std::size_t e = 0; e < n; ++e) f[e] /= nrm;
    if (f[j] < 0.0) {
      for (std::size_t e = 0; e < n; ++e) f[e] = -f[e];
    }
    rows.push_back(std::move(f));
  }
  b.table_ = std::move(rows);
  double lam = 0.0;
  for (const auto& r : b.table_) {
    for (double v : r) lam = std::max(lam, std::abs(v));
  }
  b.lambda_ = lam;
  b.second_moment_ = static_cast<double>(b.size_);
  return b;
}

void NoiseBasis::eval(double eps, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size_) {
    throw std::invalid_argument("NoiseBasis: bad output span");
  }
  if (indicator_) {
    int i = match_atom(atoms_, eps);
    if (i < 0) throw std::invalid_argument("NoiseBasis: point is not a declared atom");
    for (int k = 0; k < size_; ++k) {
      out[static_cast<std::size_t>(k)] =
          table_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    }
    return;
  }
  // p_1..p_size at eps
  std::vector<double> vals(static_cast<std::size_t>(size_) + 1);
  hermite_values(size_ + 1, eps, vals);
  std::copy(vals.begin() + 1, vals.end(), out.begin());
}

std::vector<double> NoiseBasis::eval(double eps) const {
  std::vector<double> out(static_cast<std::size_t>(size_));
  eval(eps, out);
  return out;
}

void NoiseBasis::sigma_inverse_apply(std::span<const double> in,
                                     std::span<double> out) const {
  if (in.size() != out.size() || static_cast<int>(in.size()) != size_) {
    throw std::invalid_argument("NoiseBasis: bad span size");
  }
  std::copy(in.begin(), in.end(), out.begin());
}

double NoiseBasis::max_abs_mean(const NoiseLaw& law) const {
  double worst = 0.0;
  for (int k = 0; k < size_; ++k) {
    double mk = law.expect([this, k](double eps) {
      std::vector<double> v(static_cast<std::size_t>(size_));
      eval(eps, v);
      return v[static_cast<std::size_t>(k)];
    });
    worst = std::max(worst, std::abs(mk));
  }
  return worst;
}

}  // namespace mdpb
