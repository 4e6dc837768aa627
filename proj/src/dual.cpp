#include "mdpb/dual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <utility>

#include "mdpb/detsum.hpp"

namespace mdpb {

namespace {

constexpr std::uint64_t kTagDualNoise = 0xD7A;

}  // namespace

std::vector<double> dual_noise_block(const NoiseLaw& law, int t, int sample_size,
                                     std::uint64_t seed) {
  if (sample_size < 1) throw std::invalid_argument("dual_noise_block: sample_size < 1");
  std::vector<double> block(sample_size);
  for (int m = 0; m < sample_size; ++m) {
    Rng r = Rng::stream(seed, kTagDualNoise, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(m));
    block[m] = law.sample(r);
  }
  return block;
}

std::vector<double> estimate_dual_coeffs(const MdpModel& m,
                                         const std::function<double(double)>& v_next,
                                         const NoiseBasis& psi, int t, double x,
                                         double a, std::span<const double> noise_block) {
  if (noise_block.empty()) {
    throw std::invalid_argument("estimate_dual_coeffs: empty noise block");
  }
  const int K = psi.size();
  std::vector<double> raw(K), tilde(K);
  std::vector<CompensatedSum> acc(K);
  for (double eps : noise_block) {
    double v = v_next(m.kernel(t, x, a, eps));
    psi.eval(eps, raw);
    psi.sigma_inverse_apply(raw, tilde);
    for (int k = 0; k < K; ++k) acc[k].add(v * tilde[k]);
  }
  std::vector<double> c(K);
  for (int k = 0; k < K; ++k) {
    c[k] = acc[k].value() / static_cast<double>(noise_block.size());
  }
  return c;
}

std::vector<double> exact_dual_coeffs(const MdpModel& m,
                                      const std::function<double(double)>& v_next,
                                      const NoiseBasis& psi, int t, double x,
                                      double a) {
  if (!m.noise.enumerable()) {
    throw std::invalid_argument("exact_dual_coeffs: noise law is not enumerable");
  }
  const int K = psi.size();
  std::vector<double> raw(K), tilde(K);
  std::vector<CompensatedSum> acc(K);
  const auto& atoms = m.noise.atoms();
  const auto& probs = m.noise.probs();
  for (std::size_t e = 0; e < atoms.size(); ++e) {
    double v = v_next(m.kernel(t, x, a, atoms[e]));
    psi.eval(atoms[e], raw);
    psi.sigma_inverse_apply(raw, tilde);
    for (int k = 0; k < K; ++k) acc[k].add(probs[e] * v * tilde[k]);
  }
  std::vector<double> c(K);
  for (int k = 0; k < K; ++k) c[k] = acc[k].value();
  return c;
}

// =====================================================================
// DualMartingale
// =====================================================================

DualMartingale::DualMartingale(NoiseBasis psi, int horizon,
                               std::vector<std::vector<GridInterpolant>> coeff,
                               int sample_size, double zero_mean_audit)
    : psi_(std::move(psi)),
      horizon_(horizon),
      coeff_(std::move(coeff)),
      sample_size_(sample_size),
      zero_mean_audit_(zero_mean_audit) {
  if (horizon_ < 1) throw std::invalid_argument("DualMartingale: horizon < 1");
  if (coeff_.size() != static_cast<std::size_t>(horizon_)) {
    throw std::invalid_argument("DualMartingale: one coefficient row per stage required");
  }
  for (const auto& row : coeff_) {
    if (row.size() != static_cast<std::size_t>(psi_.size())) {
      throw std::invalid_argument("DualMartingale: coefficient/basis size mismatch");
    }
    for (const auto& g : row) g.validate();
  }
}

double DualMartingale::penalty(int t, double x, double a, double eps) const {
  if (t < 1 || t > horizon_) {
    throw std::out_of_range("DualMartingale::penalty: stage out of range");
  }
  const int K = psi_.size();
  double small[32];
  std::vector<double> big;
  std::span<double> raw;
  if (K <= 32) {
    raw = std::span<double>(small, static_cast<std::size_t>(K));
  } else {
    big.resize(K);
    raw = big;
  }
  psi_.eval(eps, raw);
  const auto& row = coeff_[static_cast<std::size_t>(t - 1)];
  double out = 0.0;
  for (int k = 0; k < K; ++k) out += row[k](x, a) * raw[k];
  return out;
}

PenaltyFn DualMartingale::as_penalty() const {
  auto self = std::make_shared<DualMartingale>(*this);
  return [self](int t, double x, double a, double eps) {
    return self->penalty(t, x, a, eps);
  };
}

// =====================================================================
// Builders
// =====================================================================

DualMartingale build_dual_martingale(const MdpModel& m,
                                     const std::function<double(int, double)>& value,
                                     double value_lipschitz, const NoiseBasis& psi,
                                     std::uint64_t seed, const DualBuildOptions& opt) {
  if (m.horizon < 1) throw std::invalid_argument("build_dual_martingale: horizon < 1");
  if (opt.lipschitz_mode == CoeffLipschitz::Fixed && !(opt.lipschitz_value >= 0.0)) {
    throw std::invalid_argument("build_dual_martingale: negative fixed constant");
  }
  if (opt.exact_noise && !m.noise.enumerable()) {
    throw std::invalid_argument(
        "build_dual_martingale: exact integration needs an enumerable law");
  }

  // Gate: every basis member must be mean-zero under the law that actually
  // drives the chain, not just under the basis's nominal law.
  double audit = psi.max_abs_mean(m.noise);
  if (!(audit <= opt.audit_tol)) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "build_dual_martingale: zero-mean audit failed (%.3e > %.3e)", audit,
                  opt.audit_tol);
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
  // A finite state space is fully enumerated, and the pathwise problems
  // only ever query evaluation actions, so lookup needs no interpolation.
  bool lookup = m.states.is_finite();

  const int K = psi.size();
  double theory_l = value_lipschitz * m.lip_kernel * psi.lambda_bound();

  std::vector<std::vector<GridInterpolant>> coeff(m.horizon);
  for (int t = 1; t <= m.horizon; ++t) {
    auto v_next = [&value, t](double y) { return value(t, y); };
    std::vector<double> block;
    if (!opt.exact_noise) block = dual_noise_block(m.noise, t, opt.sample_size, seed);

    std::vector<std::vector<double>> fitted(grid.size());
    parallel_for(static_cast<std::int64_t>(grid.size()), opt.threads,
                 [&](std::int64_t g) {
                   const auto& [x, a] = grid[static_cast<std::size_t>(g)];
                   fitted[static_cast<std::size_t>(g)] =
                       opt.exact_noise
                           ? exact_dual_coeffs(m, v_next, psi, t, x, a)
                           : estimate_dual_coeffs(m, v_next, psi, t, x, a, block);
                 });

    auto& row = coeff[static_cast<std::size_t>(t - 1)];
    row.resize(K);
    for (int k = 0; k < K; ++k) {
      GridInterpolant gi;
      gi.points = grid;
      gi.metric = m.metric;
      gi.exact_lookup = lookup;
      gi.values.resize(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        gi.values[g] = fitted[g][static_cast<std::size_t>(k)];
      }
      switch (opt.lipschitz_mode) {
        case CoeffLipschitz::Theory:
          gi.lipschitz = theory_l;
          break;
        case CoeffLipschitz::Fixed:
          gi.lipschitz = opt.lipschitz_value;
          break;
        case CoeffLipschitz::MaxSlope:
          gi.lipschitz = max_slope(gi.points, gi.values, m.metric);
          break;
      }
      row[static_cast<std::size_t>(k)] = std::move(gi);
    }
  }
  return DualMartingale(psi, m.horizon, std::move(coeff),
                        opt.exact_noise ? 0 : opt.sample_size, audit);
}

DualMartingale build_dual_martingale(const MdpModel& m, const PrimalSolution& primal,
                                     const NoiseBasis& psi, std::uint64_t seed,
                                     const DualBuildOptions& opt) {
  auto value = [&primal](int t, double y) { return primal.value(t, y); };
  return build_dual_martingale(m, value, primal.value_lipschitz(), psi, seed, opt);
}

// =====================================================================
// Ideal penalties
// =====================================================================

PenaltyFn centered_value_penalty(const MdpModel& m,
                                 const std::function<double(int, double)>& value) {
  MdpModel model = m;
  return [model, value](int t, double x, double a, double eps) {
    double realized = value(t, model.kernel(t, x, a, eps));
    double expected = model.noise.expect(
        [&](double e) { return value(t, model.kernel(t, x, a, e)); });
    return realized - expected;
  };
}

PenaltyFn exact_dual_penalty(const MdpModel& m, const ExactSolution& exact) {
  auto value = [exact](int t, double y) { return exact.value(t, y); };
  return centered_value_penalty(m, value);
}

}  // namespace mdpb
