#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oqr/datagen.hpp"
#include "oqr/model.hpp"
#include "oqr/schedules.hpp"

namespace oqr {

struct TrajectoryRow
{
  std::int64_t t = 0;
  double rel_err = 0.0;
  /// Stepsize of the update that produced this row's iterate (0 on row 0).
  double eta = 0.0;
  Phase phase = Phase::One;
  /// Sum of raw per-step excess losses f_s(beta_s) - f_s(beta*) for s < t.
  double regret_cum = 0.0;
  bool diverged = false;
  /// Observations consumed so far.
  std::int64_t samples = 0;
};

struct TrajectoryRecord
{
  std::vector<TrajectoryRow> rows;
  std::optional<std::int64_t> t1;
  std::optional<std::int64_t> t2;
  std::optional<std::int64_t> diverged_at;

  bool diverged() const { return diverged_at.has_value(); }
  TrajectoryRow const &final_row() const { return rows.back(); }
};

struct SummaryRow
{
  std::int64_t t = 0;
  double rel_err_mean = 0.0;
  double rel_err_median = 0.0;
  double rel_err_q25 = 0.0;
  double rel_err_q75 = 0.0;
  double eta = 0.0;
  Phase phase = Phase::One;
  double regret_mean = 0.0;
  double diverged_frac = 0.0;
  double samples_mean = 0.0;
};

struct EnsembleSummary
{
  std::vector<SummaryRow> rows;
  std::size_t replications = 0;
  double divergence_fraction = 0.0;
};

double relative_error(Vector const &beta, Vector const &beta_star);

/// f_t(beta_t) - f_t(beta*) with f_t the mean check loss over `data_t`.
double regret_increment(QuantileLevel const &q, BatchData const &data_t, Vector const &beta_t,
                        Vector const &beta_star);

struct McEstimate
{
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of rho(y - x'beta) - rho(y - x'beta*) over N fresh
/// draws from the generative model.
McEstimate mc_excess_risk(QuantileLevel const &q, Vector const &beta, GroundTruth const &truth,
                          CovariateSpec const &cov, NoiseSpec const &noise, std::int64_t n,
                          RngStream &rng);

/// E{ |X'(beta - beta*) + xi| - |xi| } for X ~ N(0, I), xi ~ N(0, sigma^2):
/// sqrt(2/pi) * |D|^2 / (sqrt(|D|^2 + sigma^2) + sigma). Absolute-loss scale,
/// i.e. twice the median check loss.
double gaussian_excess_risk_closed_form(double delta_norm, double sigma);

double quantile_sorted(std::vector<double> const &sorted, double p);

/// Aggregates at t = 0, thin, 2 thin, ... across replications. All records must
/// share the same length (diverged ones are padded by the runner).
EnsembleSummary summarize_ensemble(std::vector<TrajectoryRecord> const &records,
                                   std::int64_t thin);

struct LogRegretFit
{
  double a = 1.0;
  double b = 0.0;
  double scale = 1.0;
  double r2 = 0.0;
};

/// Least squares fit of regret ~ b + scale * log(1 + t / a). `a` is searched on
/// [1, 10 T] (coarse log-grid scan, then golden section in log a); b and scale
/// are closed-form at each a. Passing `fixed_scale` pins the amplitude.
LogRegretFit fit_log_regret(std::vector<std::pair<double, double>> const &series,
                            std::optional<double> fixed_scale = std::nullopt);

} // namespace oqr
