// Command-line front end: every run is one validated JSON configuration
// plus a subcommand picking how much of the pipeline to execute.  Results
// go to stdout, or atomically into --out DIR; timing goes to stderr so
// artifacts stay byte-identical across thread counts.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdpb/exact.hpp"
#include "mdpb/harness.hpp"
#include "mdpb/score.hpp"

namespace {

using mdpb::json;

mdpb::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  return mdpb::config_from_json(j);
}

void emit(const std::string& out_dir, const std::string& name,
          const std::string& content) {
  if (out_dir.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::filesystem::create_directories(out_dir);
  std::string path = (std::filesystem::path(out_dir) / name).string();
  mdpb::write_file_atomic(path, content);
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

json oracle_document(const mdpb::ExperimentConfig& cfg) {
  mdpb::MdpModel m = mdpb::make_testbed(cfg);
  if (!m.states.is_finite() || !m.noise.enumerable()) {
    throw std::runtime_error(
        "oracle: needs a finite state space and enumerable noise");
  }
  mdpb::ExactSolution ex = mdpb::solve_exact(m);
  json j;
  j["schema_version"] = 1;
  j["model"] = m.name;
  j["horizon"] = m.horizon;
  j["x0"] = m.x0;
  j["value_x0"] = ex.value(0, m.x0);
  j["states"] = ex.states;
  j["actions"] = ex.actions;
  json values = json::array();
  for (int h = 0; h <= m.horizon; ++h) {
    json row = json::array();
    for (double x : ex.states) row.push_back(ex.value(h, x));
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  json policy = json::array();
  for (int h = 0; h < m.horizon; ++h) {
    json row = json::array();
    for (std::size_t i = 0; i < ex.states.size(); ++i) {
      row.push_back(ex.actions[static_cast<std::size_t>(
          ex.policy_at[static_cast<std::size_t>(h)][i])]);
    }
    policy.push_back(std::move(row));
  }
  j["policy"] = std::move(policy);
  return j;
}

json primal_document(const mdpb::ExperimentConfig& cfg) {
  mdpb::MdpModel m = mdpb::make_testbed(cfg);
  mdpb::ReferenceMeasure mu = mdpb::make_measure(cfg, m);
  mdpb::StateBasis basis = mdpb::make_state_basis(cfg, m, mu);
  mdpb::PrimalOptions opt;
  opt.final_stage_mc = cfg.primal.final_stage_mc;
  opt.threads = cfg.threads;
  mdpb::PrimalSolution sol =
      mdpb::backward_pass(m, mu, basis, cfg.primal.n, cfg.primal.seed, opt);
  json j;
  j["schema_version"] = 1;
  j["model"] = m.name;
  j["x0"] = m.x0;
  j["value_x0"] = sol.value(0, m.x0);
  j["value_lipschitz"] = sol.value_lipschitz();
  j["basis_size"] = basis.size();
  j["sample_size"] = sol.sample_size();
  j["seed"] = sol.seed();
  json stages = json::array();
  for (const mdpb::StageEstimate& s : sol.stages()) {
    json st;
    st["stage"] = s.stage;
    st["clip_level"] = s.clip_level;
    st["clip_rate"] = s.clip_rate;
    st["beta_norm"] = s.beta_norm;
    st["beta"] = s.beta;
    stages.push_back(std::move(st));
  }
  j["stages"] = std::move(stages);
  json echo = mdpb::config_to_json(cfg);
  echo.erase("threads");  // execution detail, kept out of artifacts
  j["config"] = std::move(echo);
  return j;
}

json dual_document(const mdpb::ExperimentConfig& cfg) {
  mdpb::MdpModel m = mdpb::make_testbed(cfg);
  mdpb::ReferenceMeasure mu = mdpb::make_measure(cfg, m);
  mdpb::StateBasis basis = mdpb::make_state_basis(cfg, m, mu);
  mdpb::PrimalOptions popt;
  popt.final_stage_mc = cfg.primal.final_stage_mc;
  popt.threads = cfg.threads;
  mdpb::PrimalSolution sol =
      mdpb::backward_pass(m, mu, basis, cfg.primal.n, cfg.primal.seed, popt);
  if (cfg.dual.family == "score") {
    mdpb::ScoreFamily fam(mdpb::drift1d_density(), cfg.dual.score_size);
    mdpb::ScoreBuildOptions opt;
    opt.sample_size = cfg.dual.m;
    opt.state_points = cfg.dual.state_points;
    opt.random_grid = cfg.dual.random_grid;
    opt.lipschitz_mode = mdpb::lipschitz_mode_of(cfg.dual.lipschitz_mode);
    opt.lipschitz_value = cfg.dual.lipschitz_value;
    opt.damping = cfg.dual.damping;
    opt.threads = cfg.threads;
    return mdpb::score_to_json(
        mdpb::build_score_martingale(m, sol, fam, cfg.dual.seed, opt));
  }
  mdpb::NoiseBasis psi = mdpb::make_noise_basis(cfg, m);
  mdpb::DualBuildOptions opt;
  opt.sample_size = cfg.dual.m;
  opt.exact_noise = cfg.dual.exact_noise;
  opt.state_points = cfg.dual.state_points;
  opt.random_grid = cfg.dual.random_grid;
  opt.lipschitz_mode = mdpb::lipschitz_mode_of(cfg.dual.lipschitz_mode);
  opt.lipschitz_value = cfg.dual.lipschitz_value;
  opt.threads = cfg.threads;
  return mdpb::dual_to_json(
      mdpb::build_dual_martingale(m, sol, psi, cfg.dual.seed, opt));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual bounds for finite-horizon stochastic control"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed_primal = 0, seed_dual = 0, seed_test = 0;
  int threads = 0, levels = 6;
  std::int64_t probe_start = 128;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir,
                    "directory for artifacts (default: print to stdout)");
    sub->add_option("--seed-primal", seed_primal, "override the primal stage seed");
    sub->add_option("--seed-dual", seed_dual, "override the dual stage seed");
    sub->add_option("--seed-test", seed_test, "override the evaluation seed");
    sub->add_option("--threads", threads, "override the worker count");
  };

  CLI::App* sub_oracle =
      app.add_subcommand("oracle", "exact backward induction values");
  CLI::App* sub_primal =
      app.add_subcommand("primal", "regression value estimate and diagnostics");
  CLI::App* sub_dual = app.add_subcommand("dual", "fitted penalty document");
  CLI::App* sub_bound =
      app.add_subcommand("bound", "two-sided bounds with the duality gap");
  CLI::App* sub_ladder =
      app.add_subcommand("ladder", "doubling-budget sweep of the bounds");
  CLI::App* sub_probe =
      app.add_subcommand("uniform-error", "uniform Monte Carlo error decay");
  for (CLI::App* s :
       {sub_oracle, sub_primal, sub_dual, sub_bound, sub_ladder, sub_probe}) {
    add_common(s);
  }
  sub_ladder->add_option("--levels", levels, "budget doublings to run");
  sub_probe->add_option("--levels", levels, "sample-size doublings to run");
  sub_probe->add_option("--start", probe_start, "smallest sample count");

  CLI11_PARSE(app, argc, argv);

  try {
    mdpb::ExperimentConfig cfg = load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed-primal")) cfg.primal.seed = seed_primal;
    if (sub->count("--seed-dual")) cfg.dual.seed = seed_dual;
    if (sub->count("--seed-test")) cfg.test.seed = seed_test;
    if (sub->count("--threads")) cfg.threads = threads;
    mdpb::require_valid(cfg);
    if (levels < 1) throw std::invalid_argument("levels: must be >= 1");
    if (probe_start < 1) throw std::invalid_argument("start: must be >= 1");

    auto t0 = std::chrono::steady_clock::now();
    std::string name;
    if (sub_oracle->parsed()) {
      emit(out_dir, "oracle.json", oracle_document(cfg).dump(2) + "\n");
      name = "oracle";
    } else if (sub_primal->parsed()) {
      emit(out_dir, "primal.json", primal_document(cfg).dump(2) + "\n");
      name = "primal";
    } else if (sub_dual->parsed()) {
      emit(out_dir, "dual.json", dual_document(cfg).dump(2) + "\n");
      name = "dual";
    } else if (sub_bound->parsed()) {
      mdpb::BoundReport r = mdpb::duality_gap_experiment(cfg);
      emit(out_dir, "bound.json", mdpb::report_to_json(r).dump(2) + "\n");
      name = "bound";
    } else if (sub_ladder->parsed()) {
      emit(out_dir, "ladder.csv", mdpb::ladder_csv(mdpb::budget_ladder(cfg, levels)));
      name = "ladder";
    } else {
      // scaling family f(a, xi) = a xi over a in [0, 1]: mean zero for
      // every a, so the probe reads off the uniform Monte Carlo error
      std::vector<double> params;
      for (int i = 0; i <= 10; ++i) params.push_back(0.1 * i);
      std::vector<std::int64_t> ladder;
      for (int i = 0; i < levels; ++i) ladder.push_back(probe_start << i);
      auto points = mdpb::uniform_error_probe(
          [](double a, double xi) { return a * xi; }, params, ladder,
          [](double) { return 0.0; }, cfg.test.seed);
      emit(out_dir, "uniform_error.csv", mdpb::uniform_error_csv(points));
      name = "uniform-error";
    }
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::fprintf(stderr, "%s: %.3f s\n", name.c_str(), dt.count());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
