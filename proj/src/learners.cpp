#include "oqr/learners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oqr/errors.hpp"

namespace oqr {

namespace {

constexpr double ls_norm_guard = 1e12;

void check_dim(LearnerState const &state, Index dim)
{
  if (dim != state.beta.size()) {
    throw ConfigError("learner: data dimension " + std::to_string(dim) +
                      " does not match beta dimension " + std::to_string(state.beta.size()));
  }
}

/// Phase bookkeeping at the start of step t, then the stepsize for it.
double begin_step(LearnerState &state)
{
  std::optional<double> err;
  if (state.beta_star) err = (state.beta - *state.beta_star).norm();
  bool const three = state.mode() == Mode::Batch;
  auto const next = should_switch(state.policy, state.phase, state.t, err, state.thresholds, three,
                                  &state.monitor);
  if (next.phase != state.phase.phase) state.monitor.reset();
  state.phase = next;
  double const eta = step_size(state.schedule, state.phase, state.t);
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw NumericalDivergence("stepsize is not a positive finite number at t = " +
                              std::to_string(state.t));
  }
  return eta;
}

StepReport finish_step(LearnerState &state, double eta, Vector const &g, double loss,
                       std::optional<double> loss_star)
{
  Vector next = state.beta - eta * g;
  if (!next.allFinite()) {
    throw NumericalDivergence("non-finite iterate at t = " + std::to_string(state.t));
  }
  if (state.mode() == Mode::LeastSquares && next.norm() > ls_norm_guard) {
    throw NumericalDivergence("least squares iterate norm exceeded 1e12 at t = " +
                              std::to_string(state.t));
  }
  state.beta = std::move(next);
  state.t += 1;
  if (std::isfinite(loss)) state.monitor.record(loss);
  StepReport rep;
  rep.eta_used = eta;
  rep.grad_norm = g.norm();
  rep.phase_after = state.phase;
  rep.loss = loss;
  rep.loss_star = loss_star;
  return rep;
}

StepReport qr_step_on(LearnerState &state, BatchData const &data, QuantileLevel const &q)
{
  double const eta = begin_step(state);
  Vector const g = subgrad_mean(q, data, state.beta);
  double const loss = empirical_loss(q, data, state.beta);
  std::optional<double> star;
  if (state.beta_star) star = empirical_loss(q, data, *state.beta_star);
  return finish_step(state, eta, g, loss, star);
}

} // namespace

LearnerState make_learner(ScheduleConfig schedule, SwitchPolicy policy,
                          SwitchThresholds thresholds, Vector beta0,
                          std::optional<Vector> beta_star)
{
  if (beta0.size() == 0) throw ConfigError("learner: beta0 must be non-empty");
  if (!beta0.allFinite()) throw ConfigError("learner: beta0 must be finite");
  if (beta_star && beta_star->size() != beta0.size()) {
    throw ConfigError("learner: beta* dimension mismatch");
  }
  if (beta_star && policy.kind == SwitchPolicy::Kind::OracleRadius) {
    double const d0 = (beta0 - *beta_star).norm();
    if (d0 > 0.0) schedule.d0 = d0;
  }
  if (policy.kind == SwitchPolicy::Kind::OracleRadius && !beta_star) {
    throw ConfigError("learner: oracle switching needs beta*");
  }
  schedule.validate();
  policy.validate();

  LearnerState s;
  s.beta = std::move(beta0);
  s.schedule = schedule;
  s.policy = policy;
  s.thresholds = thresholds;
  s.beta_star = std::move(beta_star);
  if (schedule.mode == Mode::InfiniteStorage) s.store.emplace(s.beta.size());
  return s;
}

StepReport step_online_qr(LearnerState &state, Observation const &obs, QuantileLevel const &q)
{
  check_dim(state, obs.x.size());
  double const eta = begin_step(state);
  Vector const g = subgrad_point(q, obs, state.beta);
  double const loss = check_loss(q, obs.y - obs.x.dot(state.beta));
  std::optional<double> star;
  if (state.beta_star) star = check_loss(q, obs.y - obs.x.dot(*state.beta_star));
  return finish_step(state, eta, g, loss, star);
}

StepReport step_batch_qr(LearnerState &state, BatchData const &batch, QuantileLevel const &q)
{
  if (batch.empty()) throw ConfigError("step_batch_qr: empty batch");
  check_dim(state, batch.dim());
  return qr_step_on(state, batch, q);
}

StepReport step_infinite_qr(LearnerState &state, BatchData const &new_batch,
                            QuantileLevel const &q)
{
  if (new_batch.empty()) throw ConfigError("step_infinite_qr: empty batch");
  if (!state.store) throw ConfigError("step_infinite_qr: learner has no store");
  check_dim(state, new_batch.dim());
  state.store->append(new_batch);
  return qr_step_on(state, *state.store, q);
}

StepReport step_online_ls(LearnerState &state, Observation const &obs)
{
  check_dim(state, obs.x.size());
  double const eta = begin_step(state);
  Vector const g = squared_loss_grad(obs, state.beta);
  double const loss = squared_loss(obs, state.beta);
  std::optional<double> star;
  if (state.beta_star) star = squared_loss(obs, *state.beta_star);
  return finish_step(state, eta, g, loss, star);
}

StepReport step_batch_ls(LearnerState &state, BatchData const &batch)
{
  if (batch.empty()) throw ConfigError("step_batch_ls: empty batch");
  check_dim(state, batch.dim());
  double const eta = begin_step(state);
  Vector const g = squared_loss_grad_mean(batch, state.beta);
  double const loss = squared_loss_mean(batch, state.beta);
  std::optional<double> star;
  if (state.beta_star) star = squared_loss_mean(batch, *state.beta_star);
  return finish_step(state, eta, g, loss, star);
}

StepReport step(LearnerState &state, BatchData const &data, QuantileLevel const &q)
{
  switch (state.mode()) {
  case Mode::OnlineOneSample:
    if (data.size() == 1) return step_online_qr(state, data.observation(0), q);
    return step_batch_qr(state, data, q);
  case Mode::Batch: return step_batch_qr(state, data, q);
  case Mode::InfiniteStorage: return step_infinite_qr(state, data, q);
  case Mode::LeastSquares:
    if (data.size() == 1) return step_online_ls(state, data.observation(0));
    return step_batch_ls(state, data);
  }
  throw ConfigError("step: unhandled mode");
}

OfflineFit fit_offline_qr(QuantileLevel const &q, BatchData const &data, OfflineConfig const &cfg,
                          std::function<void(std::int64_t, Vector const &)> const &on_iter)
{
  if (data.empty()) throw ConfigError("fit_offline_qr: empty data");
  Index const d = data.dim();
  double const n = static_cast<double>(data.size());
  std::int64_t budget = 0;
  if (cfg.budget) {
    budget = *cfg.budget;
  } else {
    budget = static_cast<std::int64_t>(std::ceil(10.0 * d * std::log(std::max(n, 2.0))));
    budget = std::max<std::int64_t>(budget, 200);
  }
  if (budget < 1) throw ConfigError("fit_offline_qr: budget must be >= 1");
  if (!(cfg.resolution > 0.0 && cfg.resolution < 1.0)) {
    throw ConfigError("fit_offline_qr: resolution must lie in (0, 1)");
  }
  if (!(cfg.geometric_fraction > 0.0 && cfg.geometric_fraction <= 1.0)) {
    throw ConfigError("fit_offline_qr: geometric_fraction must lie in (0, 1]");
  }

  Vector beta = cfg.beta_init ? *cfg.beta_init : Vector::Zero(d);
  if (beta.size() != d) throw ConfigError("fit_offline_qr: beta_init dimension mismatch");

  // Initial step length: twice the response scale over the covariate scale.
  double const y2 = data.y().squaredNorm() / n;
  double const x2 = data.x().squaredNorm() / n / static_cast<double>(d);
  double r0 = 2.0 * std::sqrt(y2 / std::max(x2, 1e-300));
  if (!(r0 > 0.0) || !std::isfinite(r0)) r0 = 1.0;

  auto const geo_steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(cfg.geometric_fraction * budget)));
  double const rho = std::pow(cfg.resolution, 1.0 / static_cast<double>(geo_steps));

  OfflineFit out;
  double const loss0 = empirical_loss(q, data, beta);
  out.beta = beta;
  out.loss = loss0;
  double radius = r0;
  for (std::int64_t k = 0; k < budget; ++k) {
    Vector const g = subgrad_mean(q, data, beta);
    double const gn = g.norm();
    if (gn == 0.0) break;
    beta -= (radius / gn) * g;
    if (k + 1 < geo_steps) radius *= rho;
    double const loss = empirical_loss(q, data, beta);
    if (loss < out.loss) {
      out.loss = loss;
      out.beta = beta;
    }
    out.iterations = k + 1;
    if (on_iter) on_iter(k + 1, beta);
  }
  out.no_improvement = !(out.loss < loss0);
  return out;
}

Vector fit_ols(BatchData const &data)
{
  if (data.empty()) throw ConfigError("fit_ols: empty data");
  Matrix const xtx = data.x().transpose() * data.x();
  Vector const xty = data.x().transpose() * data.y();
  return solve_spd(xtx, xty);
}

TrajectoryRecord run_trajectory(LearnerState &state, BatchStream &stream, QuantileLevel const &q,
                                TrajectoryHooks const &hooks)
{
  if (!state.beta_star) throw ConfigError("run_trajectory: learner needs beta*");
  Vector const &star = *state.beta_star;
  std::size_t const steps = stream.remaining();

  TrajectoryRecord rec;
  rec.rows.reserve(steps + 1);
  TrajectoryRow row;
  row.t = state.t;
  row.rel_err = relative_error(state.beta, star);
  row.phase = state.phase.phase;
  rec.rows.push_back(row);

  for (std::size_t s = 0; s < steps; ++s) {
    BatchData const data = stream.next();
    StepReport rep;
    try {
      rep = step(state, data, q);
    } catch (NumericalDivergence const &) {
      rec.diverged_at = state.t;
      break;
    }
    row.t = state.t;
    row.rel_err = relative_error(state.beta, star);
    row.eta = rep.eta_used;
    row.phase = rep.phase_after.phase;
    row.regret_cum += rep.loss - rep.loss_star.value_or(rep.loss);
    row.samples += data.size();
    rec.rows.push_back(row);
    if (hooks.on_step) hooks.on_step(state, rep, data);
  }
  if (rec.diverged_at) {
    TrajectoryRow pad = rec.rows.back();
    pad.diverged = true;
    while (rec.rows.size() < steps + 1) {
      pad.t += 1;
      rec.rows.push_back(pad);
    }
  }
  rec.t1 = state.phase.t1;
  rec.t2 = state.phase.t2;
  return rec;
}

} // namespace oqr
