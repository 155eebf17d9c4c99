#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "oqr/datagen.hpp"
#include "oqr/schedules.hpp"

namespace oqr {

struct NoiseConfig
{
  std::string family = "gaussian";
  double sigma = 1.0;
  double nu = 1.1;
  double scale = 1.0;

  NoiseFamily to_family() const;
};

struct CovarianceConfig
{
  CovarianceKind kind = CovarianceKind::Identity;
  std::vector<double> values;
  std::vector<std::vector<double>> matrix;

  CovariateSpec to_spec(Index dim) const;
};

struct SwitchConfig
{
  SwitchPolicy::Kind kind = SwitchPolicy::Kind::OracleRadius;
  double radius_factor = 8.0;
  double batch_c1 = 1.0;
  std::int64_t t1 = 0;
  std::optional<std::int64_t> t2;
  /// For fixed_iteration: t1 = ceil(alpha d log(D0 / gamma)) instead of t1.
  std::optional<double> alpha;
  std::int64_t window = 100;
  double rel_improve = 0.01;
};

struct LearnerConfig
{
  Mode mode = Mode::OnlineOneSample;
  /// Absent: derived from eta0_c (and D0, C_l, C_u, tau_bar, d).
  std::optional<double> eta0;
  double eta0_c = 2.0;
  /// Absent: online uses c5, batch uses geo_c.
  std::optional<double> geo_rate;
  double geo_c = 0.05;
  double c5 = 0.05;
  /// Absent: 1 for the batch / infinite middle phase, or the theory-scale
  /// value from const_eta_c when constant_only is set.
  std::optional<double> const_eta;
  double const_eta_c = 0.05;
  bool constant_only = false;
  double ca = 20.0;
  double cb = 30.0;
  double b0_over_cl = 1.0;
  /// Absent: true for one-sample modes, false for batch modes.
  std::optional<bool> offset_scales_with_d;
  double ls_c = 0.25;
  double ls_c2 = 1.0;
  std::optional<double> d0;
  SwitchConfig sw;
};

struct ExperimentConfig
{
  std::string name = "experiment";
  std::optional<std::string> kind;
  std::int64_t d = 20;
  std::int64_t T = 20000;
  double tau = 0.5;
  NoiseConfig noise;
  double snr = 20.0;
  Direction direction = Direction::RandomUnit;
  std::vector<std::int64_t> batch_size{1};
  std::optional<std::int64_t> initial_batch;
  CovarianceConfig covariance;
  LearnerConfig learner;
  std::int64_t replications = 20;
  std::uint64_t base_seed = 1;
  std::int64_t thin = 1;
  std::string output_path = "out";
  std::optional<std::int64_t> workers;

  void validate() const;
  /// Per-step sizes: step 0 uses initial_batch when set, then batch_size cycles.
  std::vector<std::int64_t> batch_sizes(std::int64_t steps) const;
  /// The recurring (non-initial) batch size.
  std::int64_t nominal_batch() const { return batch_size.front(); }
};

/// Strict: unknown keys and type mismatches raise ConfigError naming the field path.
ExperimentConfig parse_config(nlohmann::json const &j);
nlohmann::json to_json(ExperimentConfig const &cfg);
/// Reads a config file as JSON; a manifest written by the harness is accepted too, in
/// which case its embedded config (and kind, if the config has none) is used.
nlohmann::json load_config_json(std::string const &path);
ExperimentConfig load_config(std::string const &path);

std::string to_string(CovarianceKind k);
std::string to_string(Direction d);

} // namespace oqr
