#include "mdpb/primal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdpb/detsum.hpp"

namespace mdpb {

namespace {

// Stream tags for the per-stage design block.
constexpr std::uint64_t kTagDesign = 0x581;
constexpr std::uint64_t kTagNoise = 0x451;

double design_point(const ReferenceMeasure& mu, int h, std::int64_t i,
                    std::uint64_t seed) {
  if (mu.is_finite()) {
    const auto& atoms = mu.atoms();
    return atoms[static_cast<std::size_t>(i) % atoms.size()];
  }
  Rng rng = Rng::stream(seed, kTagDesign, static_cast<std::uint64_t>(h),
                        static_cast<std::uint64_t>(i));
  return mu.scale(h) * rng.gaussian();
}

double noise_point(const NoiseLaw& law, int h, std::int64_t i, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, kTagNoise, static_cast<std::uint64_t>(h),
                        static_cast<std::uint64_t>(i));
  return law.sample(rng);
}

}  // namespace

double clip(double v, double level) {
  if (level < 0.0) throw std::invalid_argument("clip: negative level");
  return std::min(level, std::max(-level, v));
}

std::vector<double> estimate_beta(const MdpModel& m, const ReferenceMeasure& mu,
                                  const StateBasis& basis, int h,
                                  const std::function<double(double)>& v_next,
                                  double action, std::int64_t n,
                                  std::uint64_t seed, int threads) {
  if (n < 1) throw std::invalid_argument("estimate_beta: n < 1");
  if (h < 0 || h >= m.horizon) throw std::invalid_argument("estimate_beta: stage outside 0..H-1");
  const int K = basis.size();
  std::vector<double> beta(static_cast<std::size_t>(K));
  accumulate_terms(
      n, K, threads,
      [&](std::int64_t i, std::span<double> out) {
        double x = design_point(mu, h, i, seed);
        double eps = noise_point(m.noise, h, i, seed);
        double y = m.kernel(h + 1, x, action, eps);
        double z = v_next(y);
        thread_local std::vector<double> gamma, g;
        gamma.resize(static_cast<std::size_t>(K));
        g.resize(static_cast<std::size_t>(K));
        basis.eval(h, x, gamma);
        basis.sigma_inverse_apply(h, gamma, g);
        for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = z * g[static_cast<std::size_t>(k)];
      },
      beta);
  for (double& b : beta) b /= static_cast<double>(n);
  return beta;
}

// ---------------------------------------------------------------------

PrimalSolution::PrimalSolution(MdpModel model, ReferenceMeasure mu,
                               StateBasis basis, std::vector<StageEstimate> stages,
                               std::int64_t n, std::uint64_t seed, bool stage0_mc,
                               double x0)
    : model_(std::move(model)),
      mu_(std::move(mu)),
      basis_(std::move(basis)),
      actions_(model_.action_eval()),
      stages_(std::move(stages)),
      n_(n),
      seed_(seed),
      stage0_mc_(stage0_mc),
      x0_(x0) {}

double PrimalSolution::continuation(int h, double x, std::size_t action_index) const {
  const StageEstimate& st = stages_.at(static_cast<std::size_t>(h));
  if (stage0_mc_ && h == 0) {
    if (std::abs(x - x0_) > 1e-9) {
      throw std::invalid_argument("PrimalSolution: stage-0 Monte Carlo estimate only covers x0");
    }
    return clip(st.beta.at(action_index).at(0), st.clip_level);
  }
  thread_local std::vector<double> gamma;
  gamma.resize(static_cast<std::size_t>(basis_.size()));
  basis_.eval(h, x, gamma);
  const auto& b = st.beta.at(action_index);
  double dot = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) dot += b[k] * gamma[k];
  return clip(dot, st.clip_level);
}

double PrimalSolution::value(int h, double x) const {
  if (h < 0 || h > model_.horizon) {
    throw std::invalid_argument("PrimalSolution: stage outside 0..H");
  }
  if (h == model_.horizon) return model_.terminal(x);
  const StageEstimate& st = stages_[static_cast<std::size_t>(h)];
  if (stage0_mc_ && h == 0) {
    double best = 0.0;
    for (std::size_t j = 0; j < actions_.size(); ++j) {
      double v = model_.reward(h, x, actions_[j]) + continuation(h, x, j);
      if (j == 0 || v > best) best = v;
    }
    return best;
  }
  thread_local std::vector<double> gamma;
  gamma.resize(static_cast<std::size_t>(basis_.size()));
  basis_.eval(h, x, gamma);
  double best = 0.0;
  for (std::size_t j = 0; j < actions_.size(); ++j) {
    const auto& b = st.beta[j];
    double dot = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) dot += b[k] * gamma[k];
    double v = model_.reward(h, x, actions_[j]) + clip(dot, st.clip_level);
    if (j == 0 || v > best) best = v;
  }
  return best;
}

Policy PrimalSolution::greedy_policy() const {
  // The policy closure shares this solution by value.
  auto self = *this;
  Policy pi;
  pi.act = [self](int h, double x) {
    if (h < 0 || h >= self.model_.horizon) {
      throw std::invalid_argument("greedy policy: stage outside 0..H-1");
    }
    const StageEstimate& st = self.stages_[static_cast<std::size_t>(h)];
    bool tabulated = !(self.stage0_mc_ && h == 0);
    thread_local std::vector<double> gamma;
    if (tabulated) {
      gamma.resize(static_cast<std::size_t>(self.basis_.size()));
      self.basis_.eval(h, x, gamma);
    }
    double best = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < self.actions_.size(); ++j) {
      double cont;
      if (tabulated) {
        double dot = 0.0;
        const auto& b = st.beta[j];
        for (std::size_t k = 0; k < b.size(); ++k) dot += b[k] * gamma[k];
        cont = clip(dot, st.clip_level);
      } else {
        cont = self.continuation(h, x, j);
      }
      double v = self.model_.reward(h, x, self.actions_[j]) + cont;
      if (j == 0 || v > best) {
        best = v;
        best_j = j;
      }
    }
    return self.actions_[best_j];
  };
  return pi;
}

double PrimalSolution::value_lipschitz() const {
  double vmax = static_cast<double>(model_.horizon + 1) * model_.r_max;
  return model_.lip_reward +
         vmax * basis_.lambda_bound() * std::sqrt(static_cast<double>(basis_.size())) *
             basis_.lipschitz();
}

PrimalSolution backward_pass(const MdpModel& m, const ReferenceMeasure& mu,
                             const StateBasis& basis, std::int64_t n,
                             std::uint64_t seed, const PrimalOptions& opt) {
  if (n < 1) throw std::invalid_argument("backward_pass: n < 1");
  const int H = m.horizon;
  const int K = basis.size();
  const std::vector<double> actions = m.action_eval();
  std::vector<StageEstimate> stages(static_cast<std::size_t>(H));

  // Estimates are built back to front; `partial` always carries the
  // stages fitted so far so value(h+1, .) is available.
  PrimalSolution partial(m, mu, basis, stages, n, seed, false, m.x0);
  for (int h = H - 1; h >= 0; --h) {
    StageEstimate st;
    st.stage = h;
    st.clip_level = static_cast<double>(H - h) * m.r_max;
    auto v_next = [&partial, h](double y) { return partial.value(h + 1, y); };

    bool mc_stage = opt.final_stage_mc && h == 0;
    if (mc_stage) {
      // Plain Monte Carlo of the stage-1 continuation at x0; the shared
      // block convention is kept so replays match the regression path.
      st.beta.assign(actions.size(), std::vector<double>(1, 0.0));
      for (std::size_t j = 0; j < actions.size(); ++j) {
        double a = actions[j];
        double total = 0.0;
        accumulate_terms(
            n, 1, opt.threads,
            [&](std::int64_t i, std::span<double> out) {
              double eps = noise_point(m.noise, h, i, seed);
              out[0] = v_next(m.kernel(h + 1, m.x0, a, eps));
            },
            std::span<double>(&total, 1));
        st.beta[j][0] = total / static_cast<double>(n);
      }
    } else {
      st.beta.resize(actions.size());
      for (std::size_t j = 0; j < actions.size(); ++j) {
        st.beta[j] = estimate_beta(m, mu, basis, h, v_next, actions[j], n, seed,
                                   opt.threads);
      }
    }

    st.beta_norm.resize(actions.size());
    for (std::size_t j = 0; j < actions.size(); ++j) {
      double s2 = 0.0;
      for (double b : st.beta[j]) s2 += b * b;
      st.beta_norm[j] = std::sqrt(s2);
    }

    // Diagnostic: share of design points whose continuation truncates.
    if (!mc_stage) {
      std::int64_t active = 0;
      std::vector<double> gamma(static_cast<std::size_t>(K));
      for (std::int64_t i = 0; i < std::min<std::int64_t>(n, 4096); ++i) {
        double x = design_point(mu, h, i, seed);
        basis.eval(h, x, gamma);
        for (std::size_t j = 0; j < actions.size(); ++j) {
          double dot = 0.0;
          for (int k = 0; k < K; ++k) {
            dot += st.beta[j][static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k)];
          }
          if (std::abs(dot) > st.clip_level) ++active;
        }
      }
      std::int64_t probes = std::min<std::int64_t>(n, 4096) * static_cast<std::int64_t>(actions.size());
      st.clip_rate = probes > 0 ? static_cast<double>(active) / static_cast<double>(probes) : 0.0;
    }

    stages[static_cast<std::size_t>(h)] = std::move(st);
    partial = PrimalSolution(m, mu, basis, stages, n, seed, false, m.x0);
  }
  return PrimalSolution(m, mu, basis, std::move(stages), n, seed,
                        opt.final_stage_mc, m.x0);
}

}  // namespace mdpb
