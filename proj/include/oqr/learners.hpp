#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "oqr/datagen.hpp"
#include "oqr/metrics.hpp"
#include "oqr/model.hpp"
#include "oqr/schedules.hpp"

namespace oqr {

struct LearnerState
{
  Vector beta;
  std::int64_t t = 0;
  PhaseState phase;
  /// Accumulated data; present iff the schedule mode is InfiniteStorage.
  std::optional<BatchData> store;
  ScheduleConfig schedule;
  SwitchPolicy policy;
  SwitchThresholds thresholds;
  /// Known truth. Needed by the oracle switching policy and for regret.
  std::optional<Vector> beta_star;
  PlateauMonitor monitor{256};

  Mode mode() const { return schedule.mode; }
};

/// Validates everything and builds a fresh state at t = 0. Under oracle
/// switching, schedule.d0 is replaced by ||beta0 - beta*|| when that is positive.
LearnerState make_learner(ScheduleConfig schedule, SwitchPolicy policy,
                          SwitchThresholds thresholds, Vector beta0,
                          std::optional<Vector> beta_star = std::nullopt);

struct StepReport
{
  double eta_used = 0.0;
  double grad_norm = 0.0;
  PhaseState phase_after;
  /// f_t(beta_t) on the data the step consumed.
  double loss = 0.0;
  /// f_t(beta*) on the same data, when the truth is known.
  std::optional<double> loss_star;
};

StepReport step_online_qr(LearnerState &state, Observation const &obs, QuantileLevel const &q);
StepReport step_batch_qr(LearnerState &state, BatchData const &batch, QuantileLevel const &q);
/// Appends `new_batch` to the store, then steps on the whole store.
StepReport step_infinite_qr(LearnerState &state, BatchData const &new_batch,
                            QuantileLevel const &q);
StepReport step_online_ls(LearnerState &state, Observation const &obs);
/// Least squares on a batch (mean gradient); a single-row batch matches step_online_ls.
StepReport step_batch_ls(LearnerState &state, BatchData const &batch);

/// Picks the update rule from state.mode().
StepReport step(LearnerState &state, BatchData const &data, QuantileLevel const &q);

struct OfflineConfig
{
  /// Iterations; default ceil(10 d log n), at least 200.
  std::optional<std::int64_t> budget;
  /// Final radius of the geometric phase, relative to the initial radius.
  double resolution = 1e-9;
  /// Share of the budget spent in the geometric phase.
  double geometric_fraction = 0.8;
  std::optional<Vector> beta_init;
};

struct OfflineFit
{
  Vector beta;
  double loss = 0.0;
  std::int64_t iterations = 0;
  /// Set when no iterate beat the initial loss.
  bool no_improvement = false;
};

/// Full-sample normalised sub-gradient descent: step length R_k = R0 * rho^k
/// for the geometric share of the budget, then held constant. Returns the best
/// iterate seen.
OfflineFit fit_offline_qr(QuantileLevel const &q, BatchData const &data,
                          OfflineConfig const &cfg = {},
                          std::function<void(std::int64_t, Vector const &)> const &on_iter = {});

Vector fit_ols(BatchData const &data);

struct TrajectoryHooks
{
  std::function<void(LearnerState const &, StepReport const &, BatchData const &)> on_step;
};

/// Consumes every batch of `stream`, one step per batch. Requires state.beta_star.
/// A NumericalDivergence ends the run; the remaining rows repeat the last
/// finite error with diverged = true.
TrajectoryRecord run_trajectory(LearnerState &state, BatchStream &stream,
                                QuantileLevel const &q, TrajectoryHooks const &hooks = {});

} // namespace oqr
