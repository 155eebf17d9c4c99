#pragma once

// Experiment orchestration: variants per experiment kind, replication over a
// worker pool, CSV and manifest emission, and the command-line front end.
//
// Seeds: the truth beta* is drawn from RngStream(base_seed) and shared by all
// replications; replication r = 1..R draws its data from RngStream(base_seed + r).
// Every variant of an experiment sees the same data streams.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "oqr/config.hpp"
#include "oqr/learners.hpp"
#include "oqr/metrics.hpp"

namespace oqr {

enum class ExperimentKind {
  StepsizeComparison,
  AccuracyComparison,
  ConvergenceDynamics,
  ParameterSensitivity,
  RegretDynamics,
  TradeOff,
  Single
};

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(std::string const &s);

struct Variant
{
  std::string name;
  ExperimentConfig cfg;
  /// Full-sample offline quantile regression on the same data instead of a stream.
  bool offline = false;
};

std::vector<Variant> make_variants(ExperimentConfig const &cfg, ExperimentKind kind);

/// Everything derived from a config: the generative model, its scale
/// constants, and the fully specified schedule, switch and thresholds.
struct ResolvedRun
{
  CovariateSpec cov;
  NoiseSpec noise;
  QuantileLevel q{0.5};
  ScaleConstants scale;
  GroundTruth truth;
  double d0 = 0.0;
  ScheduleConfig schedule;
  SwitchPolicy policy;
  SwitchThresholds thresholds;
  std::vector<std::int64_t> sizes;
};

ResolvedRun resolve(ExperimentConfig const &cfg);

struct VariantResult
{
  std::string name;
  ResolvedRun run;
  std::vector<TrajectoryRecord> records;
  EnsembleSummary summary;
};

/// Worker count: cfg.workers, else OQR_WORKERS, else hardware concurrency.
std::size_t worker_count(ExperimentConfig const &cfg);

/// Runs one trajectory for replication r (1-based).
TrajectoryRecord run_replication(Variant const &variant, ResolvedRun const &run, std::int64_t r);

/// R replications across the worker pool, reduced in replication order.
VariantResult replicate(Variant const &variant);

/// Regret fit over rows from the median t1 (at least t = 1) onward.
LogRegretFit regret_fit(VariantResult const &res, std::optional<double> fixed_scale = {});

void emit_csv(EnsembleSummary const &summary, std::string const &path);

struct ExperimentOutput
{
  std::vector<std::string> files;
  std::vector<VariantResult> results;
  nlohmann::json manifest;
};

ExperimentOutput run_experiment(ExperimentConfig const &cfg, ExperimentKind kind);

/// Sets a dot-separated path inside a JSON config. The value text is read as
/// JSON when possible (numbers, booleans, lists) and as a string otherwise.
void set_json_path(nlohmann::json &j, std::string const &path, std::string const &value);

/// One Single-kind run per value; file names carry the parameter value.
std::vector<std::string> sweep(nlohmann::json const &base, std::string const &param,
                               std::vector<std::string> const &values);

/// Exit codes: 0 success, 2 usage or configuration error, 1 runtime error.
int cli_main(int argc, char const *const *argv);

extern char const *const version_string;

} // namespace oqr
