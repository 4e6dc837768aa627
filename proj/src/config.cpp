#include "mdpb/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace mdpb {

namespace {

// =====================================================================
// Strict typed extraction
// =====================================================================

std::string joined(const std::vector<std::string>& errs) {
  std::string out;
  for (const std::string& e : errs) {
    if (!out.empty()) out += "; ";
    out += e;
  }
  return out;
}

[[noreturn]] void throw_all(const std::vector<std::string>& errs) {
  throw std::invalid_argument("config: " + joined(errs));
}

std::string path_of(const char* sec, const char* key) {
  if (sec == nullptr || *sec == '\0') return key;
  return std::string(sec) + "." + key;
}

void check_keys(const json& j, const char* sec,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& errs) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) errs.push_back(path_of(sec, item.key().c_str()) + ": unknown field");
  }
}

void get_int(const json& j, const char* sec, const char* key, int& out,
             std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    errs.push_back(path_of(sec, key) + ": expected an integer");
    return;
  }
  out = v.get<int>();
}

void get_i64(const json& j, const char* sec, const char* key, std::int64_t& out,
             std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    errs.push_back(path_of(sec, key) + ": expected an integer");
    return;
  }
  out = v.get<std::int64_t>();
}

void get_u64(const json& j, const char* sec, const char* key, std::uint64_t& out,
             std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  bool ok = v.is_number_unsigned() ||
            (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) {
    errs.push_back(path_of(sec, key) + ": expected a nonnegative integer");
    return;
  }
  out = v.get<std::uint64_t>();
}

void get_double(const json& j, const char* sec, const char* key, double& out,
                std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) {
    errs.push_back(path_of(sec, key) + ": expected a number");
    return;
  }
  out = v.get<double>();
}

void get_bool(const json& j, const char* sec, const char* key, bool& out,
              std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean()) {
    errs.push_back(path_of(sec, key) + ": expected a boolean");
    return;
  }
  out = v.get<bool>();
}

void get_string(const json& j, const char* sec, const char* key, std::string& out,
                std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string()) {
    errs.push_back(path_of(sec, key) + ": expected a string");
    return;
  }
  out = v.get<std::string>();
}

bool is_one_of(const std::string& v, std::initializer_list<const char*> set) {
  for (const char* s : set) {
    if (v == s) return true;
  }
  return false;
}

// =====================================================================
// Interpolant serialization helpers
// =====================================================================

const char* combine_name(ProductMetric::Combine c) {
  switch (c) {
    case ProductMetric::Combine::Sum: return "sum";
    case ProductMetric::Combine::Max: return "max";
    case ProductMetric::Combine::Euclid: return "euclid";
  }
  throw std::logic_error("combine_name: bad combiner");
}

ProductMetric::Combine combine_of(const std::string& name) {
  if (name == "sum") return ProductMetric::Combine::Sum;
  if (name == "max") return ProductMetric::Combine::Max;
  if (name == "euclid") return ProductMetric::Combine::Euclid;
  throw std::invalid_argument("penalty document: unknown metric combiner " + name);
}

json interpolant_to_json(const GridInterpolant& g) {
  json j;
  j["lipschitz"] = g.lipschitz;
  j["exact_lookup"] = g.exact_lookup;
  j["combine"] = combine_name(g.metric.combine);
  json pts = json::array();
  for (const auto& [x, a] : g.points) pts.push_back(json::array({x, a}));
  j["points"] = std::move(pts);
  j["values"] = g.values;
  return j;
}

GridInterpolant interpolant_from_json(const json& j, const ProductMetric& metric) {
  GridInterpolant g;
  g.metric = metric;
  g.metric.combine = combine_of(j.at("combine").get<std::string>());
  g.lipschitz = j.at("lipschitz").get<double>();
  g.exact_lookup = j.at("exact_lookup").get<bool>();
  for (const json& p : j.at("points")) {
    g.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  g.values = j.at("values").get<std::vector<double>>();
  g.validate();
  return g;
}

json stages_to_json(const std::vector<std::vector<GridInterpolant>>& coeff) {
  json stages = json::array();
  for (std::size_t s = 0; s < coeff.size(); ++s) {
    json stage;
    stage["stage"] = static_cast<int>(s) + 1;
    json cs = json::array();
    for (const GridInterpolant& g : coeff[s]) cs.push_back(interpolant_to_json(g));
    stage["coefficients"] = std::move(cs);
    stages.push_back(std::move(stage));
  }
  return stages;
}

std::vector<std::vector<GridInterpolant>> stages_from_json(
    const json& stages, const ProductMetric& metric) {
  std::vector<std::vector<GridInterpolant>> coeff;
  for (const json& stage : stages) {
    int t = stage.at("stage").get<int>();
    if (t != static_cast<int>(coeff.size()) + 1) {
      throw std::invalid_argument("penalty document: stages out of order");
    }
    std::vector<GridInterpolant> cs;
    for (const json& c : stage.at("coefficients")) {
      cs.push_back(interpolant_from_json(c, metric));
    }
    coeff.push_back(std::move(cs));
  }
  return coeff;
}

}  // namespace

// =====================================================================
// Config round trip
// =====================================================================

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["testbed"] = cfg.testbed;
  j["horizon"] = cfg.horizon;
  if (cfg.x0) {
    j["x0"] = *cfg.x0;
  } else {
    j["x0"] = nullptr;
  }
  j["action_grid"] = cfg.action_grid;
  j["threads"] = cfg.threads;

  json b;
  b["state_family"] = cfg.basis.state_family;
  b["state_size"] = cfg.basis.state_size;
  b["noise_family"] = cfg.basis.noise_family;
  b["noise_size"] = cfg.basis.noise_size;
  b["alpha"] = cfg.basis.alpha;
  b["domain_bound"] = cfg.basis.domain_bound;
  j["basis"] = std::move(b);

  json p;
  p["n"] = cfg.primal.n;
  p["seed"] = cfg.primal.seed;
  p["final_stage_mc"] = cfg.primal.final_stage_mc;
  j["primal"] = std::move(p);

  json d;
  d["family"] = cfg.dual.family;
  d["m"] = cfg.dual.m;
  d["seed"] = cfg.dual.seed;
  d["exact_noise"] = cfg.dual.exact_noise;
  d["state_points"] = cfg.dual.state_points;
  d["random_grid"] = cfg.dual.random_grid;
  d["lipschitz_mode"] = cfg.dual.lipschitz_mode;
  d["lipschitz_value"] = cfg.dual.lipschitz_value;
  d["score_size"] = cfg.dual.score_size;
  d["damping"] = cfg.dual.damping;
  j["dual"] = std::move(d);

  json t;
  t["n"] = cfg.test.n;
  t["seed"] = cfg.test.seed;
  t["node_cap"] = cfg.test.node_cap;
  j["test"] = std::move(t);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  std::vector<std::string> errs;
  if (!j.is_object()) {
    errs.push_back("document: expected a JSON object");
    throw_all(errs);
  }
  ExperimentConfig cfg;
  check_keys(j, "",
             {"schema_version", "testbed", "horizon", "x0", "action_grid",
              "threads", "basis", "primal", "dual", "test"},
             errs);
  get_int(j, "", "schema_version", cfg.schema_version, errs);
  get_string(j, "", "testbed", cfg.testbed, errs);
  get_int(j, "", "horizon", cfg.horizon, errs);
  if (j.contains("x0") && !j.at("x0").is_null()) {
    const json& v = j.at("x0");
    if (!v.is_number()) {
      errs.push_back("x0: expected a number or null");
    } else {
      cfg.x0 = v.get<double>();
    }
  }
  get_int(j, "", "action_grid", cfg.action_grid, errs);
  get_int(j, "", "threads", cfg.threads, errs);

  if (j.contains("basis")) {
    const json& b = j.at("basis");
    if (!b.is_object()) {
      errs.push_back("basis: expected an object");
    } else {
      check_keys(b, "basis",
                 {"state_family", "state_size", "noise_family", "noise_size",
                  "alpha", "domain_bound"},
                 errs);
      get_string(b, "basis", "state_family", cfg.basis.state_family, errs);
      get_int(b, "basis", "state_size", cfg.basis.state_size, errs);
      get_string(b, "basis", "noise_family", cfg.basis.noise_family, errs);
      get_int(b, "basis", "noise_size", cfg.basis.noise_size, errs);
      get_double(b, "basis", "alpha", cfg.basis.alpha, errs);
      get_double(b, "basis", "domain_bound", cfg.basis.domain_bound, errs);
    }
  }
  if (j.contains("primal")) {
    const json& p = j.at("primal");
    if (!p.is_object()) {
      errs.push_back("primal: expected an object");
    } else {
      check_keys(p, "primal", {"n", "seed", "final_stage_mc"}, errs);
      get_i64(p, "primal", "n", cfg.primal.n, errs);
      get_u64(p, "primal", "seed", cfg.primal.seed, errs);
      get_bool(p, "primal", "final_stage_mc", cfg.primal.final_stage_mc, errs);
    }
  }
  if (j.contains("dual")) {
    const json& d = j.at("dual");
    if (!d.is_object()) {
      errs.push_back("dual: expected an object");
    } else {
      check_keys(d, "dual",
                 {"family", "m", "seed", "exact_noise", "state_points",
                  "random_grid", "lipschitz_mode", "lipschitz_value",
                  "score_size", "damping"},
                 errs);
      get_string(d, "dual", "family", cfg.dual.family, errs);
      get_int(d, "dual", "m", cfg.dual.m, errs);
      get_u64(d, "dual", "seed", cfg.dual.seed, errs);
      get_bool(d, "dual", "exact_noise", cfg.dual.exact_noise, errs);
      get_int(d, "dual", "state_points", cfg.dual.state_points, errs);
      get_bool(d, "dual", "random_grid", cfg.dual.random_grid, errs);
      get_string(d, "dual", "lipschitz_mode", cfg.dual.lipschitz_mode, errs);
      get_double(d, "dual", "lipschitz_value", cfg.dual.lipschitz_value, errs);
      get_int(d, "dual", "score_size", cfg.dual.score_size, errs);
      get_double(d, "dual", "damping", cfg.dual.damping, errs);
    }
  }
  if (j.contains("test")) {
    const json& t = j.at("test");
    if (!t.is_object()) {
      errs.push_back("test: expected an object");
    } else {
      check_keys(t, "test", {"n", "seed", "node_cap"}, errs);
      get_i64(t, "test", "n", cfg.test.n, errs);
      get_u64(t, "test", "seed", cfg.test.seed, errs);
      get_i64(t, "test", "node_cap", cfg.test.node_cap, errs);
    }
  }
  if (!errs.empty()) throw_all(errs);
  return cfg;
}

// =====================================================================
// Semantic validation
// =====================================================================

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errs;
  bool testbed_ok = is_one_of(cfg.testbed, {"chain3", "drift1d", "det2"});
  bool finite_bed = cfg.testbed == "chain3" || cfg.testbed == "det2";

  if (cfg.schema_version != 1) {
    errs.push_back("schema_version: must be 1");
  }
  if (!testbed_ok) {
    errs.push_back("testbed: must be one of chain3, drift1d, det2");
  }
  if (cfg.horizon < 0) errs.push_back("horizon: must be >= 0 (0 keeps the default)");
  if (cfg.action_grid < 0) {
    errs.push_back("action_grid: must be >= 0 (0 keeps the default)");
  } else if (cfg.action_grid == 1) {
    errs.push_back("action_grid: needs at least 2 points");
  }
  if (cfg.threads < 1) errs.push_back("threads: must be >= 1");

  if (!is_one_of(cfg.basis.state_family, {"hermite", "indicator"})) {
    errs.push_back("basis.state_family: must be hermite or indicator");
  }
  if (cfg.basis.state_size < 1) errs.push_back("basis.state_size: must be >= 1");
  if (!is_one_of(cfg.basis.noise_family, {"hermite", "indicator"})) {
    errs.push_back("basis.noise_family: must be hermite or indicator");
  }
  if (cfg.basis.noise_size < 1) errs.push_back("basis.noise_size: must be >= 1");
  if (cfg.basis.domain_bound <= 0.0) {
    errs.push_back("basis.domain_bound: must be > 0");
  }
  if (testbed_ok && !finite_bed && cfg.basis.state_family == "indicator") {
    errs.push_back("basis.state_family: indicator needs a finite state space");
  }
  if (testbed_ok && finite_bed && cfg.basis.state_family == "hermite") {
    errs.push_back("basis.state_family: hermite needs a continuous state space");
  }
  if (testbed_ok && !finite_bed && cfg.basis.noise_family == "indicator") {
    errs.push_back("basis.noise_family: indicator needs enumerable noise");
  }

  if (cfg.primal.n < 1) errs.push_back("primal.n: must be >= 1");

  if (!is_one_of(cfg.dual.family, {"noise", "score"})) {
    errs.push_back("dual.family: must be noise or score");
  }
  if (cfg.dual.m < 1) errs.push_back("dual.m: must be >= 1");
  if (cfg.dual.state_points < 1) errs.push_back("dual.state_points: must be >= 1");
  if (!is_one_of(cfg.dual.lipschitz_mode, {"theory", "fixed", "max_slope"})) {
    errs.push_back("dual.lipschitz_mode: must be theory, fixed, or max_slope");
  } else if (cfg.dual.lipschitz_mode == "fixed" && cfg.dual.lipschitz_value < 0.0) {
    errs.push_back("dual.lipschitz_value: must be >= 0 in fixed mode");
  }
  if (cfg.dual.score_size < 1) errs.push_back("dual.score_size: must be >= 1");
  if (cfg.dual.damping < 0.0) errs.push_back("dual.damping: must be >= 0");
  if (testbed_ok && cfg.dual.family == "score" && cfg.testbed != "drift1d") {
    errs.push_back("dual.family: score needs Gaussian driving noise (drift1d)");
  }
  if (testbed_ok && cfg.dual.exact_noise && !finite_bed) {
    errs.push_back("dual.exact_noise: needs enumerable noise");
  }

  if (cfg.test.n < 1) errs.push_back("test.n: must be >= 1");
  if (cfg.test.node_cap < 1) errs.push_back("test.node_cap: must be >= 1");

  // start-state membership, checkable once the testbed itself is sound
  if (testbed_ok && cfg.horizon >= 0 && cfg.x0) {
    ExperimentConfig probe = cfg;
    probe.x0.reset();
    MdpModel m = make_testbed(probe);
    if (!m.states.contains(*cfg.x0)) {
      errs.push_back("x0: outside the state space");
    }
  }
  return errs;
}

void require_valid(const ExperimentConfig& cfg) {
  std::vector<std::string> errs = validate_config(cfg);
  if (!errs.empty()) throw_all(errs);
}

// =====================================================================
// Component factories
// =====================================================================

MdpModel make_testbed(const ExperimentConfig& cfg) {
  MdpModel m;
  if (cfg.testbed == "chain3") {
    Chain3Spec s;
    if (cfg.horizon > 0) s.horizon = cfg.horizon;
    m = make_chain3(s);
  } else if (cfg.testbed == "drift1d") {
    Drift1dSpec s;
    if (cfg.horizon > 0) s.horizon = cfg.horizon;
    if (cfg.action_grid > 0) s.action_grid = cfg.action_grid;
    m = make_drift1d(s);
  } else if (cfg.testbed == "det2") {
    Det2Spec s;
    if (cfg.horizon > 0) s.horizon = cfg.horizon;
    m = make_det2(s);
  } else {
    throw std::invalid_argument("testbed: unknown id " + cfg.testbed);
  }
  if (cfg.x0) {
    if (!m.states.contains(*cfg.x0)) {
      throw std::invalid_argument("x0: outside the state space");
    }
    m.x0 = *cfg.x0;
  }
  return m;
}

ReferenceMeasure make_measure(const ExperimentConfig& cfg, const MdpModel& m) {
  if (m.states.is_finite()) {
    return ReferenceMeasure::finite_uniform(m.states.values());
  }
  return ReferenceMeasure::gaussian_schedule(m.horizon, cfg.basis.alpha);
}

StateBasis make_state_basis(const ExperimentConfig& cfg, const MdpModel&,
                            const ReferenceMeasure& mu) {
  if (cfg.basis.state_family == "indicator") return StateBasis::indicator(mu);
  return StateBasis::hermite(cfg.basis.state_size, mu, cfg.basis.domain_bound);
}

NoiseBasis make_noise_basis(const ExperimentConfig& cfg, const MdpModel& m) {
  if (cfg.basis.noise_family == "indicator") return NoiseBasis::indicator(m.noise);
  return NoiseBasis::hermite(cfg.basis.noise_size);
}

CoeffLipschitz lipschitz_mode_of(const std::string& name) {
  if (name == "theory") return CoeffLipschitz::Theory;
  if (name == "fixed") return CoeffLipschitz::Fixed;
  if (name == "max_slope") return CoeffLipschitz::MaxSlope;
  throw std::invalid_argument("lipschitz_mode: unknown mode " + name);
}

// =====================================================================
// Penalty documents
// =====================================================================

json dual_to_json(const DualMartingale& d) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "noise_regression";
  j["horizon"] = d.horizon();
  j["sample_size"] = d.sample_size();
  j["zero_mean_audit"] = d.zero_mean_audit();
  json basis;
  basis["family"] = d.noise_basis().is_indicator() ? "indicator" : "hermite";
  basis["size"] = d.noise_basis().size();
  basis["domain_bound"] = d.noise_basis().domain_bound();
  j["basis"] = std::move(basis);
  j["stages"] = stages_to_json(d.coefficients());
  return j;
}

DualMartingale dual_from_json(const json& j, const NoiseLaw& law,
                              const ProductMetric& metric) {
  if (j.at("kind").get<std::string>() != "noise_regression") {
    throw std::invalid_argument("penalty document: not a noise-regression penalty");
  }
  const json& b = j.at("basis");
  std::string family = b.at("family").get<std::string>();
  int size = b.at("size").get<int>();
  NoiseBasis psi = family == "indicator"
                       ? NoiseBasis::indicator(law)
                       : NoiseBasis::hermite(size, b.at("domain_bound").get<double>());
  if (psi.size() != size) {
    throw std::invalid_argument("penalty document: basis size does not match the law");
  }
  return DualMartingale(std::move(psi), j.at("horizon").get<int>(),
                        stages_from_json(j.at("stages"), metric),
                        j.at("sample_size").get<int>(),
                        j.at("zero_mean_audit").get<double>());
}

json score_to_json(const ScoreMartingale& s) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "score";
  j["horizon"] = s.horizon();
  j["sample_size"] = s.sample_size();
  j["zero_mean_audit"] = s.zero_mean_audit();
  j["degenerate_fits"] = s.degenerate_fits();
  json fam;
  fam["size"] = s.family().size();
  fam["delta"] = s.family().law().delta;
  fam["sigma"] = s.family().law().sigma;
  j["family"] = std::move(fam);
  j["stages"] = stages_to_json(s.coefficients());
  return j;
}

ScoreMartingale score_from_json(const json& j, const ProductMetric& metric) {
  if (j.at("kind").get<std::string>() != "score") {
    throw std::invalid_argument("penalty document: not a score penalty");
  }
  const json& f = j.at("family");
  ConditionalGaussian law;
  law.delta = f.at("delta").get<double>();
  law.sigma = f.at("sigma").get<double>();
  ScoreFamily fam(law, f.at("size").get<int>());
  return ScoreMartingale(std::move(fam), j.at("horizon").get<int>(),
                         stages_from_json(j.at("stages"), metric),
                         j.at("sample_size").get<int>(),
                         j.at("zero_mean_audit").get<double>(),
                         j.at("degenerate_fits").get<int>());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

}  // namespace mdpb
