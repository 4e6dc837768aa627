#include "mdpb/score.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <utility>

#include "mdpb/detsum.hpp"
#include "mdpb/quadrature.hpp"

namespace mdpb {

namespace {

// Plain probabilists' Hermite polynomials He_0..He_{n-1}.
void hermite_poly(double z, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = z;
  for (std::size_t k = 2; k < out.size(); ++k) {
    out[k] = z * out[k - 1] - static_cast<double>(k - 1) * out[k - 2];
  }
}

// Solves A c = b in place by partial-pivot elimination; false on a
// degenerate pivot.
bool solve_linear(std::vector<std::vector<double>>& A, std::vector<double>& b) {
  const int n = static_cast<int>(A.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    if (std::abs(A[piv][col]) < 1e-300) return false;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * b[c];
    b[r] = s / A[r][r];
  }
  return true;
}

}  // namespace

// =====================================================================
// ScoreFamily
// =====================================================================

ScoreFamily::ScoreFamily(ConditionalGaussian law, int size) : law_(law), size_(size) {
  if (size_ < 1) throw std::invalid_argument("ScoreFamily: size < 1");
  if (!(law_.sigma > 0.0)) throw std::invalid_argument("ScoreFamily: sigma <= 0");
}

void ScoreFamily::eval(double z, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(size_)) {
    throw std::invalid_argument("ScoreFamily::eval: bad output size");
  }
  double he_small[16];
  std::vector<double> he_big;
  std::span<double> he;
  if (size_ <= 16) {
    he = std::span<double>(he_small, static_cast<std::size_t>(size_));
  } else {
    he_big.resize(size_);
    he = he_big;
  }
  hermite_poly(z, he);
  double inv_s = 1.0 / law_.sigma;
  out[0] = -z * inv_s;
  if (size_ == 1) return;
  double env = std::exp(-0.25 * z * z);
  // m_j = [(j-2) He_{j-3} - (3z/2) He_{j-2}] env / sigma for j >= 2
  for (int j = 2; j <= size_; ++j) {
    double lead = (j >= 3) ? static_cast<double>(j - 2) * he[j - 3] : 0.0;
    out[j - 1] = (lead - 1.5 * z * he[j - 2]) * env * inv_s;
  }
}

std::vector<double> ScoreFamily::eval(double z) const {
  std::vector<double> out(size_);
  eval(z, out);
  return out;
}

double ScoreFamily::max_abs_mean(int quad_nodes) const {
  const GaussHermite& gh = gauss_hermite(quad_nodes);
  std::vector<double> buf(size_);
  std::vector<CompensatedSum> acc(size_);
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    eval(gh.nodes[i], buf);
    for (int j = 0; j < size_; ++j) acc[j].add(gh.weights[i] * buf[j]);
  }
  double worst = 0.0;
  for (int j = 0; j < size_; ++j) worst = std::max(worst, std::abs(acc[j].value()));
  return worst;
}

// =====================================================================
// Coefficient fit
// =====================================================================

ScoreFit fit_score_coeffs(const MdpModel& m, const ScoreFamily& fam,
                          const std::function<double(double)>& v_next, int t,
                          double x, double a, std::span<const double> noise_block,
                          double damping) {
  if (noise_block.empty()) {
    throw std::invalid_argument("fit_score_coeffs: empty noise block");
  }
  if (damping < 0.0) throw std::invalid_argument("fit_score_coeffs: negative damping");
  const int J = fam.size();
  const double inv_m = 1.0 / static_cast<double>(noise_block.size());

  std::vector<std::vector<CompensatedSum>> gram(J, std::vector<CompensatedSum>(J));
  std::vector<CompensatedSum> rhs(J);
  std::vector<double> f(J);
  for (double eps : noise_block) {
    fam.eval(eps, f);
    double v = v_next(m.kernel(t, x, a, eps));
    for (int j = 0; j < J; ++j) {
      rhs[j].add(v * f[j]);
      for (int l = j; l < J; ++l) gram[j][l].add(f[j] * f[l]);
    }
  }

  std::vector<std::vector<double>> A(J, std::vector<double>(J));
  std::vector<double> b(J);
  for (int j = 0; j < J; ++j) {
    b[j] = rhs[j].value() * inv_m;
    for (int l = j; l < J; ++l) {
      A[j][l] = A[l][j] = gram[j][l].value() * inv_m;
    }
    A[j][j] += damping;
  }

  ScoreFit fit;
  if (solve_linear(A, b)) {
    fit.coeff = std::move(b);
  } else {
    fit.coeff.assign(J, 0.0);
    fit.degenerate = true;
  }
  return fit;
}

// =====================================================================
// ScoreMartingale
// =====================================================================

ScoreMartingale::ScoreMartingale(ScoreFamily family, int horizon,
                                 std::vector<std::vector<GridInterpolant>> coeff,
                                 int sample_size, double zero_mean_audit,
                                 int degenerate_fits)
    : family_(std::move(family)),
      horizon_(horizon),
      coeff_(std::move(coeff)),
      sample_size_(sample_size),
      zero_mean_audit_(zero_mean_audit),
      degenerate_fits_(degenerate_fits) {
  if (horizon_ < 1) throw std::invalid_argument("ScoreMartingale: horizon < 1");
  if (coeff_.size() != static_cast<std::size_t>(horizon_)) {
    throw std::invalid_argument("ScoreMartingale: one coefficient row per stage required");
  }
  for (const auto& row : coeff_) {
    if (row.size() != static_cast<std::size_t>(family_.size())) {
      throw std::invalid_argument("ScoreMartingale: coefficient/family size mismatch");
    }
    for (const auto& g : row) g.validate();
  }
}

double ScoreMartingale::penalty(int t, double x, double a, double eps) const {
  if (t < 1 || t > horizon_) {
    throw std::out_of_range("ScoreMartingale::penalty: stage out of range");
  }
  const int J = family_.size();
  double small[32];
  std::vector<double> big;
  std::span<double> f;
  if (J <= 32) {
    f = std::span<double>(small, static_cast<std::size_t>(J));
  } else {
    big.resize(J);
    f = big;
  }
  family_.eval(eps, f);
  const auto& row = coeff_[static_cast<std::size_t>(t - 1)];
  double out = 0.0;
  for (int j = 0; j < J; ++j) out += row[j](x, a) * f[j];
  return out;
}

PenaltyFn ScoreMartingale::as_penalty() const {
  auto self = std::make_shared<ScoreMartingale>(*this);
  return [self](int t, double x, double a, double eps) {
    return self->penalty(t, x, a, eps);
  };
}

// =====================================================================
// Builder
// =====================================================================

ScoreMartingale build_score_martingale(const MdpModel& m,
                                       const std::function<double(int, double)>& value,
                                       const ScoreFamily& fam, std::uint64_t seed,
                                       const ScoreBuildOptions& opt) {
  if (m.horizon < 1) throw std::invalid_argument("build_score_martingale: horizon < 1");
  if (!m.noise.gaussian()) {
    throw std::invalid_argument(
        "build_score_martingale: standard Gaussian driving noise required");
  }
  if (opt.lipschitz_mode == CoeffLipschitz::Fixed && !(opt.lipschitz_value >= 0.0)) {
    throw std::invalid_argument("build_score_martingale: negative fixed constant");
  }

  double audit = fam.max_abs_mean();
  if (!(audit <= opt.audit_tol)) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "build_score_martingale: zero-mean audit failed (%.3e > %.3e)",
                  audit, opt.audit_tol);
    throw std::runtime_error(buf);
  }

  std::vector<double> xs =
      space_grid(m.states, opt.state_points, opt.random_grid, opt.grid_seed);
  std::vector<double> as = m.action_eval();
  std::vector<std::pair<double, double>> grid;
  grid.reserve(xs.size() * as.size());
  for (double x : xs) {
    for (double a : as) grid.push_back({x, a});
  }
  bool lookup = m.states.is_finite();

  const int J = fam.size();
  std::vector<std::vector<GridInterpolant>> coeff(m.horizon);
  int degenerate = 0;
  for (int t = 1; t <= m.horizon; ++t) {
    auto v_next = [&value, t](double y) { return value(t, y); };
    std::vector<double> block = dual_noise_block(m.noise, t, opt.sample_size, seed);

    std::vector<ScoreFit> fitted(grid.size());
    parallel_for(static_cast<std::int64_t>(grid.size()), opt.threads,
                 [&](std::int64_t g) {
                   const auto& [x, a] = grid[static_cast<std::size_t>(g)];
                   fitted[static_cast<std::size_t>(g)] = fit_score_coeffs(
                       m, fam, v_next, t, x, a, block, opt.damping);
                 });
    for (const auto& fit : fitted) degenerate += fit.degenerate ? 1 : 0;

    auto& row = coeff[static_cast<std::size_t>(t - 1)];
    row.resize(J);
    for (int j = 0; j < J; ++j) {
      GridInterpolant gi;
      gi.points = grid;
      gi.metric = m.metric;
      gi.exact_lookup = lookup;
      gi.values.resize(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        gi.values[g] = fitted[g].coeff[static_cast<std::size_t>(j)];
      }
      switch (opt.lipschitz_mode) {
        case CoeffLipschitz::Theory:
        case CoeffLipschitz::MaxSlope:
          gi.lipschitz = max_slope(gi.points, gi.values, m.metric);
          break;
        case CoeffLipschitz::Fixed:
          gi.lipschitz = opt.lipschitz_value;
          break;
      }
      row[static_cast<std::size_t>(j)] = std::move(gi);
    }
  }
  return ScoreMartingale(fam, m.horizon, std::move(coeff), opt.sample_size, audit,
                         degenerate);
}

ScoreMartingale build_score_martingale(const MdpModel& m, const PrimalSolution& primal,
                                       const ScoreFamily& fam, std::uint64_t seed,
                                       const ScoreBuildOptions& opt) {
  auto value = [&primal](int t, double y) { return primal.value(t, y); };
  return build_score_martingale(m, value, fam, seed, opt);
}

}  // namespace mdpb
