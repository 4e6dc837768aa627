#include "mdpb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "mdpb/detsum.hpp"
#include "mdpb/exact.hpp"
#include "mdpb/score.hpp"

namespace mdpb {

namespace {

constexpr std::uint64_t kTagProbe = 0x0EE;

// Runs one pipeline stage and prefixes any failure with its name; the
// node-cap error keeps its type so callers can still catch it.
template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const NodeCapExceeded& e) {
    throw NodeCapExceeded(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

}  // namespace

// =====================================================================
// Full pipeline
// =====================================================================

BoundReport duality_gap_experiment(const ExperimentConfig& cfg) {
  require_valid(cfg);
  MdpModel m = make_testbed(cfg);

  BoundReport r;
  r.config = cfg;
  r.model_name = m.name;
  r.x0 = m.x0;

  PrimalSolution primal = stage("primal", [&] {
    ReferenceMeasure mu = make_measure(cfg, m);
    StateBasis basis = make_state_basis(cfg, m, mu);
    PrimalOptions opt;
    opt.final_stage_mc = cfg.primal.final_stage_mc;
    opt.threads = cfg.threads;
    return backward_pass(m, mu, basis, cfg.primal.n, cfg.primal.seed, opt);
  });
  r.state_basis_size = primal.basis().size();
  r.primal_value_x0 = primal.value(0, m.x0);
  for (const StageEstimate& s : primal.stages()) {
    r.max_clip_rate = std::max(r.max_clip_rate, s.clip_rate);
  }

  PenaltyFn penalty = stage("dual", [&]() -> PenaltyFn {
    if (cfg.dual.family == "score") {
      ScoreFamily fam(drift1d_density(), cfg.dual.score_size);
      ScoreBuildOptions opt;
      opt.sample_size = cfg.dual.m;
      opt.state_points = cfg.dual.state_points;
      opt.random_grid = cfg.dual.random_grid;
      opt.lipschitz_mode = lipschitz_mode_of(cfg.dual.lipschitz_mode);
      opt.lipschitz_value = cfg.dual.lipschitz_value;
      opt.damping = cfg.dual.damping;
      opt.threads = cfg.threads;
      ScoreMartingale sc = build_score_martingale(m, primal, fam, cfg.dual.seed, opt);
      r.noise_basis_size = fam.size();
      r.zero_mean_audit = sc.zero_mean_audit();
      r.grid_points = static_cast<int>(sc.coefficients()[0][0].points.size());
      return sc.as_penalty();
    }
    NoiseBasis psi = make_noise_basis(cfg, m);
    DualBuildOptions opt;
    opt.sample_size = cfg.dual.m;
    opt.exact_noise = cfg.dual.exact_noise;
    opt.state_points = cfg.dual.state_points;
    opt.random_grid = cfg.dual.random_grid;
    opt.lipschitz_mode = lipschitz_mode_of(cfg.dual.lipschitz_mode);
    opt.lipschitz_value = cfg.dual.lipschitz_value;
    opt.threads = cfg.threads;
    DualMartingale d = build_dual_martingale(m, primal, psi, cfg.dual.seed, opt);
    r.noise_basis_size = psi.size();
    r.zero_mean_audit = d.zero_mean_audit();
    r.grid_points = static_cast<int>(d.coefficients()[0][0].points.size());
    return d.as_penalty();
  });

  GapResult g = stage("test", [&] {
    return duality_gap(m, primal, penalty, m.x0, cfg.test.n, cfg.test.seed,
                       cfg.test.node_cap, cfg.threads);
  });
  r.lower = g.lower;
  r.lower_se = g.lower_se;
  r.upper = g.upper;
  r.upper_se = g.upper_se;
  r.gap = g.gap;
  r.path_min = g.path_min;
  r.path_max = g.path_max;
  r.max_nodes = g.max_nodes;

  if (m.states.is_finite() && m.noise.enumerable()) {
    r.oracle = stage("oracle", [&] { return solve_exact(m).value(0, m.x0); });
  }
  return r;
}

json report_to_json(const BoundReport& r) {
  json j;
  j["schema_version"] = 1;
  j["model"] = r.model_name;
  j["x0"] = r.x0;
  j["lower"] = r.lower;
  j["lower_se"] = r.lower_se;
  j["upper"] = r.upper;
  j["upper_se"] = r.upper_se;
  j["gap"] = r.gap;
  if (r.oracle) {
    j["oracle"] = *r.oracle;
  } else {
    j["oracle"] = nullptr;
  }
  j["primal_value_x0"] = r.primal_value_x0;
  j["zero_mean_audit"] = r.zero_mean_audit;
  j["max_clip_rate"] = r.max_clip_rate;
  j["path_min"] = r.path_min;
  j["path_max"] = r.path_max;
  j["max_nodes"] = r.max_nodes;
  json sizes;
  sizes["n"] = r.config.primal.n;
  sizes["m"] = r.config.dual.m;
  sizes["state_basis"] = r.state_basis_size;
  sizes["noise_basis"] = r.noise_basis_size;
  sizes["grid_points"] = r.grid_points;
  sizes["n_test"] = r.config.test.n;
  j["sizes"] = std::move(sizes);
  json seeds;
  seeds["primal"] = r.config.primal.seed;
  seeds["dual"] = r.config.dual.seed;
  seeds["test"] = r.config.test.seed;
  j["seeds"] = std::move(seeds);
  // threads is an execution detail, not part of the experiment identity;
  // dropping it keeps reports byte-identical across worker counts (replay
  // of the echo at the default single thread reproduces every number)
  json echo = config_to_json(r.config);
  echo.erase("threads");
  j["config"] = std::move(echo);
  return j;
}

// =====================================================================
// Budget ladder
// =====================================================================

std::vector<LadderRow> budget_ladder(const ExperimentConfig& cfg, int levels) {
  if (levels < 1) throw std::invalid_argument("budget_ladder: levels < 1");
  if (levels > 40) throw std::invalid_argument("budget_ladder: levels > 40");
  std::vector<LadderRow> rows;
  for (int i = 0; i < levels; ++i) {
    ExperimentConfig c = cfg;
    c.primal.n = cfg.primal.n << i;
    c.dual.m = cfg.dual.m << i;
    c.primal.seed = cfg.primal.seed + static_cast<std::uint64_t>(i);
    c.dual.seed = cfg.dual.seed + static_cast<std::uint64_t>(i);
    c.test.seed = cfg.test.seed + static_cast<std::uint64_t>(i);
    BoundReport r = duality_gap_experiment(c);
    LadderRow row;
    row.n = c.primal.n;
    row.m = c.dual.m;
    row.lower = r.lower;
    row.lower_se = r.lower_se;
    row.upper = r.upper;
    row.upper_se = r.upper_se;
    row.gap = r.gap;
    row.oracle = r.oracle;
    row.seed = c.test.seed;
    rows.push_back(row);
  }
  return rows;
}

std::string ladder_csv(const std::vector<LadderRow>& rows) {
  std::string out = "n,m,lower,lower_se,upper,upper_se,gap,oracle,seed\n";
  char buf[64];
  for (const LadderRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,", static_cast<long long>(r.n),
                  static_cast<long long>(r.m));
    out += buf;
    out += format_full(r.lower) + "," + format_full(r.lower_se) + ",";
    out += format_full(r.upper) + "," + format_full(r.upper_se) + ",";
    out += format_full(r.gap) + ",";
    if (r.oracle) out += format_full(*r.oracle);
    std::snprintf(buf, sizeof(buf), ",%llu\n",
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

// =====================================================================
// Uniform error probe
// =====================================================================

std::vector<UniformErrorPoint> uniform_error_probe(
    const std::function<double(double, double)>& f, std::span<const double> params,
    std::span<const std::int64_t> ladder,
    const std::function<double(double)>& true_mean, std::uint64_t seed) {
  if (!f || !true_mean) throw std::invalid_argument("uniform_error_probe: no family");
  if (params.empty()) throw std::invalid_argument("uniform_error_probe: no parameters");
  if (ladder.empty()) throw std::invalid_argument("uniform_error_probe: empty ladder");
  for (std::int64_t n : ladder) {
    if (n < 1) throw std::invalid_argument("uniform_error_probe: sample count < 1");
  }

  // Sample counts evaluated in increasing order on one shared stream, so
  // a larger budget extends the smaller one's draws; results are reported
  // in the caller's order.
  std::vector<std::size_t> order(ladder.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ladder[a] < ladder[b]; });

  std::vector<UniformErrorPoint> out(ladder.size());
  std::vector<CompensatedSum> sums(params.size());
  std::int64_t drawn = 0;
  for (std::size_t idx : order) {
    std::int64_t n = ladder[idx];
    for (; drawn < n; ++drawn) {
      Rng rng = Rng::stream(seed, kTagProbe, 0, static_cast<std::uint64_t>(drawn));
      double xi = rng.gaussian();
      for (std::size_t p = 0; p < params.size(); ++p) {
        sums[p].add(f(params[p], xi));
      }
    }
    double sup = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      double emp = sums[p].value() / static_cast<double>(n);
      sup = std::max(sup, std::abs(emp - true_mean(params[p])));
    }
    out[idx] = UniformErrorPoint{n, sup};
  }
  return out;
}

double probe_reference_mean(const std::function<double(double, double)>& f, double a,
                            std::int64_t n_ref, std::uint64_t seed) {
  if (n_ref < 1) throw std::invalid_argument("probe_reference_mean: n_ref < 1");
  CompensatedSum sum;
  for (std::int64_t i = 0; i < n_ref; ++i) {
    Rng rng = Rng::stream(seed, kTagProbe, 1, static_cast<std::uint64_t>(i));
    sum.add(f(a, rng.gaussian()));
  }
  return sum.value() / static_cast<double>(n_ref);
}

std::string uniform_error_csv(std::span<const UniformErrorPoint> points) {
  std::string out = "n,sup_error\n";
  char buf[32];
  for (const UniformErrorPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%lld,", static_cast<long long>(p.n));
    out += buf;
    out += format_full(p.sup_error) + "\n";
  }
  return out;
}

// =====================================================================
// Shared numerics
// =====================================================================

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("log_log_slope: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("log_log_slope: need two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("log_log_slope: nonpositive entry");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("log_log_slope: degenerate abscissae");
  return sxy / sxx;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace mdpb
