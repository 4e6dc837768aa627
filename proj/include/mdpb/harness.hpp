#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdpb/bounds.hpp"
#include "mdpb/config.hpp"

namespace mdpb {

// =====================================================================
// Experiment harness
// =====================================================================
//
// Composes the pipeline primal fit -> penalty build -> sandwich bounds
// from one validated configuration, with every stage's failure prefixed
// by its name ("primal: ...", "dual: ...", "test: ...").  Reports carry
// the full configuration echo, so a report is replayable by itself.
// Serialized artifacts depend only on the configuration, never on the
// thread count or the clock.

struct BoundReport {
  ExperimentConfig config;  // replayable fingerprint
  std::string model_name;
  double x0 = 0.0;

  double lower = 0.0;  // greedy-policy rollout value
  double lower_se = 0.0;
  double upper = 0.0;  // mean penalized pathwise supremum
  double upper_se = 0.0;
  double gap = 0.0;                // upper - lower
  std::optional<double> oracle;    // exact optimal value, finite testbeds

  double primal_value_x0 = 0.0;    // regression estimate at the start state
  double zero_mean_audit = 0.0;    // max |E[basis member]| under the law
  double max_clip_rate = 0.0;      // worst stage's clipping activation
  double path_min = 0.0;
  double path_max = 0.0;
  std::int64_t max_nodes = 0;

  int state_basis_size = 0;  // resolved sizes (indicator families derive
  int noise_basis_size = 0;  // theirs from the testbed)
  int grid_points = 0;       // penalty coefficient grid
};

// Full pipeline at the configured budgets and seeds.
BoundReport duality_gap_experiment(const ExperimentConfig& cfg);

json report_to_json(const BoundReport& r);

// ---------------------------------------------------------------------
// Budget ladder
// ---------------------------------------------------------------------

// One sandwich per level with N and M doubled each time; level i runs at
// (primal.n << i, dual.m << i) with every stage seed shifted by i so
// levels are independent replications.
struct LadderRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  double lower = 0.0;
  double lower_se = 0.0;
  double upper = 0.0;
  double upper_se = 0.0;
  double gap = 0.0;
  std::optional<double> oracle;
  std::uint64_t seed = 0;  // test seed of the level
};

std::vector<LadderRow> budget_ladder(const ExperimentConfig& cfg, int levels);

// Header n,m,lower,lower_se,upper,upper_se,gap,oracle,seed; doubles in
// round-trip precision, oracle blank when unavailable.
std::string ladder_csv(const std::vector<LadderRow>& rows);

// ---------------------------------------------------------------------
// Uniform error probe
// ---------------------------------------------------------------------
//
// Empirical check of the uniform-in-parameters Monte Carlo error that the
// coefficient fits lean on: one standard normal draw block shared by the
// whole parameter grid (first n draws of the stream at sample count n),
// sup over the grid of |empirical mean - true mean| per ladder entry.

struct UniformErrorPoint {
  std::int64_t n = 0;
  double sup_error = 0.0;
};

std::vector<UniformErrorPoint> uniform_error_probe(
    const std::function<double(double a, double xi)>& f,
    std::span<const double> params, std::span<const std::int64_t> ladder,
    const std::function<double(double a)>& true_mean, std::uint64_t seed);

// Reference mean by brute Monte Carlo on an independent stream, for
// families without an analytic value.
double probe_reference_mean(const std::function<double(double, double)>& f,
                            double a, std::int64_t n_ref, std::uint64_t seed);

// Header n,sup_error.
std::string uniform_error_csv(std::span<const UniformErrorPoint> points);

// ---------------------------------------------------------------------
// Shared numerics
// ---------------------------------------------------------------------

// Least-squares slope of log y against log x; every entry must be
// positive.  The rate-study assertions run through this.
double log_log_slope(std::span<const double> x, std::span<const double> y);

// Round-trip decimal formatting ("%.17g") shared by the CSV writers.
std::string format_full(double v);

}  // namespace mdpb
