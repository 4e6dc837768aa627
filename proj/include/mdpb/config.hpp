#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdpb/basis.hpp"
#include "mdpb/dual.hpp"
#include "mdpb/model.hpp"
#include "mdpb/score.hpp"
#include "mdpb/testbeds.hpp"

namespace mdpb {

// =====================================================================
// Experiment configuration
// =====================================================================
//
// One JSON document pins everything an experiment needs: testbed, basis
// families and sizes, sample budgets, and explicit seeds for the primal,
// dual, and test stages.  Parsing is strict (unknown keys are errors),
// validation reports every offending field at once, and
// parse(serialize(c)) is the identity so configs echoed into reports are
// replayable.

using json = nlohmann::ordered_json;

struct BasisConfig {
  // hermite | indicator; finite testbeds take indicator state bases,
  // continuous ones take hermite.
  std::string state_family = "indicator";
  int state_size = 5;  // ignored for indicator (atom count)
  std::string noise_family = "indicator";  // hermite | indicator
  int noise_size = 3;                      // ignored for indicator (atoms - 1)
  double alpha = 0.0;                    // reference variance decay; <= 0: horizon
  double domain_bound = 6.0;  // certification box for the hermite state family
};

struct PrimalConfig {
  std::int64_t n = 1024;  // regression sample size per stage
  std::uint64_t seed = 1;
  bool final_stage_mc = false;  // plain-average stage-0 variant, x0 only
};

struct DualConfig {
  std::string family = "noise";  // noise | score
  int m = 1024;                  // per-stage noise block size
  std::uint64_t seed = 2;
  bool exact_noise = false;  // integrate atoms instead of sampling (noise family)
  int state_points = 17;     // grid resolution per box axis
  bool random_grid = false;
  std::string lipschitz_mode = "theory";  // theory | fixed | max_slope
  double lipschitz_value = 0.0;           // constant for fixed mode
  int score_size = 3;                     // members of the score family
  double damping = 1e-10;                 // ridge for the score normal equations
};

struct TestConfig {
  std::int64_t n = 4096;  // evaluation paths for both bounds
  std::uint64_t seed = 3;
  std::int64_t node_cap = 1'000'000;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string testbed = "chain3";  // chain3 | drift1d | det2
  int horizon = 0;                 // 0: testbed default
  std::optional<double> x0;        // empty: testbed default
  int action_grid = 0;             // drift1d action resolution; 0: default
  int threads = 1;
  BasisConfig basis;
  PrimalConfig primal;
  DualConfig dual;
  TestConfig test;
};

// Canonical serialization: every field emitted, fixed order, absent x0 as
// null.  Doubles survive the round trip bit-exactly.
json config_to_json(const ExperimentConfig& cfg);

// Strict parse.  Collects one message per offending field (wrong type,
// unknown key) instead of stopping at the first; on any error throws
// std::invalid_argument whose what() lists all of them.
ExperimentConfig config_from_json(const json& j);

// Semantic validation: ranges, enum values, and cross-field requirements
// (indicator bases need finite spaces, score family needs Gaussian
// noise).  Returns every violation as "field: problem".
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// validate_config + throw std::invalid_argument listing all violations.
void require_valid(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------
// Component factories
// ---------------------------------------------------------------------

// Testbed with horizon / start state / action-grid overrides applied.
MdpModel make_testbed(const ExperimentConfig& cfg);

ReferenceMeasure make_measure(const ExperimentConfig& cfg, const MdpModel& m);
StateBasis make_state_basis(const ExperimentConfig& cfg, const MdpModel& m,
                            const ReferenceMeasure& mu);
NoiseBasis make_noise_basis(const ExperimentConfig& cfg, const MdpModel& m);
CoeffLipschitz lipschitz_mode_of(const std::string& name);

// ---------------------------------------------------------------------
// Penalty serialization
// ---------------------------------------------------------------------
//
// Fitted martingales are documents: grids, coefficients, basis identity,
// Lipschitz constants, and seeds round-trip through JSON so bounds can be
// recomputed without refitting.  Coefficient doubles are bit-exact across
// the trip.

json dual_to_json(const DualMartingale& d);
DualMartingale dual_from_json(const json& j, const NoiseLaw& law,
                              const ProductMetric& metric = {});

json score_to_json(const ScoreMartingale& s);
ScoreMartingale score_from_json(const json& j, const ProductMetric& metric = {});

// Write content to path via a temporary sibling + rename, so readers
// never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mdpb
