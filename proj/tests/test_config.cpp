#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "mdpb/config.hpp"
#include "mdpb/rng.hpp"

using namespace mdpb;

namespace {

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

ExperimentConfig drift_config() {
  ExperimentConfig cfg;
  cfg.testbed = "drift1d";
  cfg.horizon = 3;
  cfg.x0 = 0.5;
  cfg.action_grid = 5;
  cfg.threads = 2;
  cfg.basis.state_family = "hermite";
  cfg.basis.state_size = 4;
  cfg.basis.noise_family = "hermite";
  cfg.basis.noise_size = 2;
  cfg.basis.alpha = 3.5;
  cfg.basis.domain_bound = 7.0;
  cfg.primal.n = 96;
  cfg.primal.seed = 0xFFFFFFFFFFFFFFFFull;
  cfg.primal.final_stage_mc = true;
  cfg.dual.family = "score";
  cfg.dual.m = 48;
  cfg.dual.seed = 0x123456789ABCDEFull;
  cfg.dual.state_points = 7;
  cfg.dual.random_grid = true;
  cfg.dual.lipschitz_mode = "fixed";
  cfg.dual.lipschitz_value = 0.1;
  cfg.dual.score_size = 2;
  cfg.dual.damping = 1e-9;
  cfg.test.n = 64;
  cfg.test.seed = 77;
  cfg.test.node_cap = 4096;
  return cfg;
}

}  // namespace

TEST_CASE("the default configuration is valid and round-trips") {
  ExperimentConfig cfg;
  json j = config_to_json(cfg);
  CHECK(validate_config(cfg).empty());
  ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  // and through text, which is what files and reports carry
  CHECK(json::parse(j.dump()) == j);
  CHECK(config_to_json(config_from_json(json::parse(j.dump(2)))) == j);
}

TEST_CASE("every field survives the round trip, extreme seeds included") {
  ExperimentConfig cfg = drift_config();
  CHECK(validate_config(cfg).empty());
  json j = config_to_json(cfg);
  ExperimentConfig back = config_from_json(json::parse(j.dump()));
  CHECK(config_to_json(back) == j);
  CHECK(back.primal.seed == 0xFFFFFFFFFFFFFFFFull);
  CHECK(back.dual.seed == 0x123456789ABCDEFull);
  CHECK(back.x0.has_value());
  CHECK(*back.x0 == 0.5);
  CHECK(back.basis.alpha == 3.5);
  CHECK(back.dual.damping == 1e-9);
}

TEST_CASE("an empty document parses to the defaults") {
  ExperimentConfig parsed = config_from_json(json::object());
  CHECK(config_to_json(parsed) == config_to_json(ExperimentConfig{}));
  CHECK_FALSE(parsed.x0.has_value());
}

TEST_CASE("parsing reports every unknown or ill-typed field at once") {
  json j;
  j["qux"] = 1;
  j["horizon"] = "four";
  j["primal"] = json{{"n", "big"}, {"seed", -3}};
  j["dual"] = json{{"m", true}, {"mm", 2}};
  std::string msg = thrown_message([&] { (void)config_from_json(j); });
  CHECK(msg.find("qux: unknown field") != std::string::npos);
  CHECK(msg.find("horizon: expected an integer") != std::string::npos);
  CHECK(msg.find("primal.n: expected an integer") != std::string::npos);
  CHECK(msg.find("primal.seed: expected a nonnegative integer") != std::string::npos);
  CHECK(msg.find("dual.m: expected an integer") != std::string::npos);
  CHECK(msg.find("dual.mm: unknown field") != std::string::npos);
}

TEST_CASE("validation collects every semantic violation") {
  ExperimentConfig cfg;
  cfg.testbed = "warp";
  cfg.threads = 0;
  cfg.primal.n = 0;
  cfg.dual.m = 0;
  cfg.test.n = 0;
  std::vector<std::string> errs = validate_config(cfg);
  CHECK(errs.size() == 5);
  std::string all = thrown_message([&] { require_valid(cfg); });
  CHECK(all.find("testbed") != std::string::npos);
  CHECK(all.find("threads") != std::string::npos);
  CHECK(all.find("primal.n") != std::string::npos);
  CHECK(all.find("dual.m") != std::string::npos);
  CHECK(all.find("test.n") != std::string::npos);
}

TEST_CASE("cross-field rules tie families to the testbed") {
  ExperimentConfig cfg;  // chain3
  cfg.basis.state_family = "hermite";
  std::vector<std::string> errs = validate_config(cfg);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("basis.state_family") == 0);

  cfg = ExperimentConfig{};
  cfg.dual.family = "score";
  errs = validate_config(cfg);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("dual.family") == 0);

  cfg = ExperimentConfig{};
  cfg.x0 = 9.0;
  errs = validate_config(cfg);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("x0") == 0);

  cfg = drift_config();
  cfg.basis.noise_family = "indicator";
  cfg.dual.family = "noise";
  cfg.dual.exact_noise = true;
  errs = validate_config(cfg);
  REQUIRE(errs.size() == 2);
  CHECK(errs[0].find("basis.noise_family") == 0);
  CHECK(errs[1].find("dual.exact_noise") == 0);
}

TEST_CASE("factories assemble the configured components") {
  ExperimentConfig cfg;  // chain3 defaults
  cfg.x0 = 2.0;
  MdpModel m = make_testbed(cfg);
  CHECK(m.name == "chain3");
  CHECK(m.x0 == 2.0);
  ReferenceMeasure mu = make_measure(cfg, m);
  CHECK(mu.is_finite());
  StateBasis basis = make_state_basis(cfg, m, mu);
  CHECK(basis.is_indicator());
  CHECK(basis.size() == 3);
  NoiseBasis psi = make_noise_basis(cfg, m);
  CHECK(psi.is_indicator());
  CHECK(psi.size() == 1);

  ExperimentConfig d = drift_config();
  MdpModel md = make_testbed(d);
  CHECK(md.name == "drift1d");
  CHECK(md.horizon == 3);
  CHECK(md.action_eval().size() == 5);
  CHECK(md.x0 == 0.5);
  ReferenceMeasure mud = make_measure(d, md);
  CHECK_FALSE(mud.is_finite());
  StateBasis bd = make_state_basis(d, md, mud);
  CHECK(bd.size() == 4);
  CHECK(bd.domain_bound() == 7.0);
  NoiseBasis pd = make_noise_basis(d, md);
  CHECK_FALSE(pd.is_indicator());
  CHECK(pd.size() == 2);

  CHECK(lipschitz_mode_of("theory") == CoeffLipschitz::Theory);
  CHECK(lipschitz_mode_of("fixed") == CoeffLipschitz::Fixed);
  CHECK(lipschitz_mode_of("max_slope") == CoeffLipschitz::MaxSlope);
  CHECK_THROWS(lipschitz_mode_of("loose"));
}

TEST_CASE("noise-regression penalties round-trip through text bit-exactly") {
  MdpModel m = make_chain3();
  ReferenceMeasure mu = ReferenceMeasure::finite_uniform(m.states.values());
  StateBasis basis = StateBasis::indicator(mu);
  PrimalSolution primal = backward_pass(m, mu, basis, 60, 5);
  NoiseBasis psi = NoiseBasis::indicator(m.noise);
  DualBuildOptions opt;
  opt.sample_size = 64;
  DualMartingale dual = build_dual_martingale(m, primal, psi, 9, opt);

  json doc = dual_to_json(dual);
  DualMartingale back = dual_from_json(json::parse(doc.dump()), m.noise, m.metric);
  CHECK(back.horizon() == dual.horizon());
  CHECK(back.sample_size() == dual.sample_size());
  CHECK(back.zero_mean_audit() == dual.zero_mean_audit());
  REQUIRE(back.coefficients().size() == dual.coefficients().size());
  for (std::size_t s = 0; s < dual.coefficients().size(); ++s) {
    REQUIRE(back.coefficients()[s].size() == dual.coefficients()[s].size());
    for (std::size_t k = 0; k < dual.coefficients()[s].size(); ++k) {
      CHECK(back.coefficients()[s][k].values == dual.coefficients()[s][k].values);
      CHECK(back.coefficients()[s][k].points == dual.coefficients()[s][k].points);
      CHECK(back.coefficients()[s][k].lipschitz ==
            dual.coefficients()[s][k].lipschitz);
    }
  }
  Rng rng = Rng::stream(404, 0);
  for (int i = 0; i < 100; ++i) {
    int t = 1 + static_cast<int>(rng.uniform01() * m.horizon);
    double x = std::floor(rng.uniform(0.0, 3.0));
    double a = std::floor(rng.uniform(0.0, 2.0));
    double eps = m.noise.sample(rng);
    CHECK(back.penalty(t, x, a, eps) == dual.penalty(t, x, a, eps));
  }
  CHECK_THROWS(score_from_json(doc));  // wrong document kind
}

TEST_CASE("score penalties round-trip through text bit-exactly") {
  Drift1dSpec spec;
  spec.horizon = 2;
  spec.action_grid = 3;
  MdpModel m = make_drift1d(spec);
  ReferenceMeasure mu = ReferenceMeasure::gaussian_schedule(m.horizon);
  StateBasis basis = StateBasis::hermite(3, mu);
  PrimalSolution primal = backward_pass(m, mu, basis, 64, 3);
  ScoreFamily fam(drift1d_density(spec), 2);
  ScoreBuildOptions opt;
  opt.sample_size = 128;
  opt.state_points = 5;
  ScoreMartingale sc = build_score_martingale(m, primal, fam, 13, opt);

  json doc = score_to_json(sc);
  ScoreMartingale back = score_from_json(json::parse(doc.dump()), m.metric);
  CHECK(back.horizon() == sc.horizon());
  CHECK(back.degenerate_fits() == sc.degenerate_fits());
  CHECK(back.family().size() == sc.family().size());
  CHECK(back.family().law().sigma == sc.family().law().sigma);
  Rng rng = Rng::stream(405, 0);
  for (int i = 0; i < 100; ++i) {
    int t = 1 + static_cast<int>(rng.uniform01() * m.horizon);
    double x = rng.uniform(-4.0, 4.0);
    double a = rng.uniform(-1.0, 1.0);
    double eps = rng.gaussian();
    CHECK(back.penalty(t, x, a, eps) == sc.penalty(t, x, a, eps));
  }
  CHECK_THROWS(dual_from_json(doc, m.noise, m.metric));
}

TEST_CASE("atomic writes land complete or not at all") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mdpb_config_test";
  fs::create_directories(dir);
  fs::path target = dir / "report.json";

  write_file_atomic(target.string(), "first\n");
  write_file_atomic(target.string(), "second\n");  // overwrite in place
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));

  CHECK_THROWS(write_file_atomic((dir / "no_such_dir" / "x.json").string(), "y"));
  fs::remove_all(dir);
}
