#include "oqr/schedules.hpp"

#include <cmath>

#include "oqr/errors.hpp"

namespace oqr {

namespace {

void require_positive(double v, char const *field)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("schedule.") + field + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

} // namespace

std::string to_string(Phase p)
{
  switch (p) {
  case Phase::One: return "one";
  case Phase::Two: return "two";
  case Phase::Three: return "three";
  }
  return "?";
}

std::string to_string(Mode m)
{
  switch (m) {
  case Mode::OnlineOneSample: return "online";
  case Mode::Batch: return "batch";
  case Mode::InfiniteStorage: return "infinite";
  case Mode::LeastSquares: return "least_squares";
  }
  return "?";
}

Mode mode_from_string(std::string const &s)
{
  if (s == "online") return Mode::OnlineOneSample;
  if (s == "batch") return Mode::Batch;
  if (s == "infinite") return Mode::InfiniteStorage;
  if (s == "least_squares") return Mode::LeastSquares;
  throw ConfigError("unknown learner mode '" + s + "'");
}

std::string to_string(SwitchPolicy::Kind k)
{
  switch (k) {
  case SwitchPolicy::Kind::OracleRadius: return "oracle_radius";
  case SwitchPolicy::Kind::FixedIteration: return "fixed_iteration";
  case SwitchPolicy::Kind::PlateauDetect: return "plateau";
  }
  return "?";
}

void ScheduleConfig::validate() const
{
  require_positive(eta0, "eta0");
  require_positive(geo_rate, "geo_rate");
  if (!(geo_rate < 1.0)) throw ConfigError("schedule.geo_rate must be < 1");
  require_positive(const_eta, "const_eta");
  require_positive(ca, "ca");
  require_positive(cb, "cb");
  require_positive(b0_over_cl, "b0_over_cl");
  if (d < 1) throw ConfigError("schedule.d must be >= 1");
  require_positive(c_l, "c_l");
  require_positive(c_u, "c_u");
  if (c_l > c_u) throw ConfigError("schedule.c_l must not exceed schedule.c_u");
  require_positive(d0, "d0");
  require_positive(ls_c, "ls_c");
  require_positive(ls_c2, "ls_c2");
}

double theory_eta0_online(double c, double c_l, double c_u, double tau_bar, double d0, double d)
{
  return c * std::sqrt(c_l) / (c_u * tau_bar * tau_bar) * d0 / d;
}

double theory_geo_rate_online(double c5, double c_l, double c_u, double tau_bar, double d)
{
  return 1.0 - c5 * (c_l / c_u) / (d * tau_bar * tau_bar);
}

double theory_eta0_batch(double c, double c_l, double c_u, double d0)
{
  return c * std::sqrt(c_l) / c_u * d0;
}

double theory_geo_rate_batch(double c, double c_l, double c_u) { return 1.0 - c * c_l / c_u; }

double theory_constant_eta(double c, double c_l, double c_u, double b0, double b1)
{
  return (c_l / (c_u * c_u)) * (b1 * b1 / b0) * c;
}

double eta_phase1_geometric(std::int64_t t, ScheduleConfig const &cfg)
{
  return cfg.eta0 * std::pow(cfg.geo_rate, static_cast<double>(t));
}

double eta_phase2_inverse_time(std::int64_t t, std::int64_t t_start, ScheduleConfig const &cfg)
{
  double const offset = cfg.offset_scales_with_d ? cfg.cb * static_cast<double>(cfg.d) : cfg.cb;
  double const denom = static_cast<double>(t - t_start) + offset;
  if (!(denom > 0.0)) {
    throw ConfigError("inverse-time stepsize: denominator " + std::to_string(denom) +
                      " is not positive");
  }
  return cfg.b0_over_cl * cfg.ca / denom;
}

double eta_constant(ScheduleConfig const &cfg) { return cfg.const_eta; }

double eta_infinite_phase1(std::int64_t t, ScheduleConfig const &cfg)
{
  double const rate = 1.0 - 0.01 * cfg.c_l / cfg.c_u;
  return std::sqrt(cfg.c_l) / (8.0 * cfg.c_u) * std::pow(rate, static_cast<double>(t)) * cfg.d0;
}

double eta_least_squares(std::int64_t t, PhaseState const &phase, ScheduleConfig const &cfg)
{
  double const d = static_cast<double>(cfg.d);
  if (phase.phase == Phase::One) return cfg.ls_c / d;
  std::int64_t const t1 = phase.t1.value_or(0);
  return cfg.ls_c2 / (static_cast<double>(t - t1) + d);
}

double step_size(ScheduleConfig const &cfg, PhaseState const &phase, std::int64_t t)
{
  if (cfg.constant_only) return eta_constant(cfg);
  switch (cfg.mode) {
  case Mode::OnlineOneSample:
    if (phase.phase == Phase::One) return eta_phase1_geometric(t, cfg);
    return eta_phase2_inverse_time(t, phase.t1.value_or(0), cfg);
  case Mode::Batch:
    switch (phase.phase) {
    case Phase::One: return eta_phase1_geometric(t, cfg);
    case Phase::Two: return eta_constant(cfg);
    case Phase::Three: return eta_phase2_inverse_time(t, phase.t2.value_or(0), cfg);
    }
    break;
  case Mode::InfiniteStorage:
    if (phase.phase == Phase::One) return eta_infinite_phase1(t, cfg);
    return eta_constant(cfg);
  case Mode::LeastSquares: return eta_least_squares(t, phase, cfg);
  }
  throw ConfigError("step_size: unhandled mode");
}

SwitchPolicy SwitchPolicy::fixed_iteration(std::int64_t t1, std::optional<std::int64_t> t2)
{
  SwitchPolicy p;
  p.kind = Kind::FixedIteration;
  p.t1 = t1;
  p.t2 = t2;
  p.validate();
  return p;
}

SwitchPolicy SwitchPolicy::plateau_detect(std::int64_t window, double rel_improve)
{
  SwitchPolicy p;
  p.kind = Kind::PlateauDetect;
  p.window = window;
  p.rel_improve = rel_improve;
  p.validate();
  return p;
}

SwitchPolicy SwitchPolicy::fixed_from_theory(double alpha, double d, double d0, double gamma)
{
  if (!(alpha > 0.0) || !(gamma > 0.0) || !(d0 > 0.0)) {
    throw ConfigError("fixed_from_theory: alpha, d0 and gamma must be positive");
  }
  double const t1 = std::ceil(alpha * d * std::log(d0 / gamma));
  return fixed_iteration(t1 > 0.0 ? static_cast<std::int64_t>(t1) : 0);
}

void SwitchPolicy::validate() const
{
  switch (kind) {
  case Kind::OracleRadius: return;
  case Kind::FixedIteration:
    if (t1 < 0) throw ConfigError("switch.t1 must be >= 0");
    if (t2 && *t2 < t1) throw ConfigError("switch.t2 must be >= switch.t1");
    return;
  case Kind::PlateauDetect:
    if (window < 1) throw ConfigError("switch.window must be >= 1");
    if (!(rel_improve > 0.0)) throw ConfigError("switch.rel_improve must be > 0");
    return;
  }
}

SwitchThresholds make_thresholds(double gamma, double c_l, double c_u, double tau_bar, double d,
                                 double n, double b0, double radius_factor, double c1)
{
  SwitchThresholds th;
  th.radius = radius_factor * gamma / std::sqrt(c_l);
  th.batch_boundary = c1 * std::sqrt(c_u) / c_l * tau_bar * std::sqrt(d / n) * b0;
  return th;
}

void PlateauMonitor::record(double value)
{
  values_.push_back(value);
  if (keep_ > 0 && values_.size() > keep_) values_.pop_front();
  ++count_;
}

bool PlateauMonitor::plateaued(std::int64_t window, double rel_improve) const
{
  auto const w = static_cast<std::size_t>(window);
  if (values_.size() < 2 * w) return false;
  double prev = 0.0, last = 0.0;
  auto const n = values_.size();
  for (std::size_t i = n - 2 * w; i < n - w; ++i) prev += values_[i];
  for (std::size_t i = n - w; i < n; ++i) last += values_[i];
  prev /= static_cast<double>(w);
  last /= static_cast<double>(w);
  if (prev == 0.0) return true;
  return (prev - last) / std::fabs(prev) < rel_improve;
}

void PlateauMonitor::reset()
{
  values_.clear();
  count_ = 0;
}

PhaseState should_switch(SwitchPolicy const &policy, PhaseState state, std::int64_t t,
                         std::optional<double> err, SwitchThresholds const &thresholds,
                         bool allow_phase_three, PlateauMonitor const *monitor)
{
  auto advance = [&](Phase to) {
    if (to == Phase::Two && !state.t1) state.t1 = t;
    if (to == Phase::Three) {
      if (!state.t1) state.t1 = t;
      if (!state.t2) state.t2 = t;
    }
    state.phase = to;
  };

  switch (policy.kind) {
  case SwitchPolicy::Kind::OracleRadius:
    if (!err) throw ConfigError("oracle_radius switching needs the current error");
    if (state.phase == Phase::One && *err < thresholds.radius) advance(Phase::Two);
    if (allow_phase_three && state.phase == Phase::Two && *err <= thresholds.batch_boundary) {
      advance(Phase::Three);
    }
    break;
  case SwitchPolicy::Kind::FixedIteration:
    if (state.phase == Phase::One && t >= policy.t1) advance(Phase::Two);
    if (allow_phase_three && state.phase == Phase::Two && policy.t2 && t >= *policy.t2) {
      advance(Phase::Three);
    }
    break;
  case SwitchPolicy::Kind::PlateauDetect:
    if (!monitor) throw ConfigError("plateau switching needs a monitor");
    if (monitor->plateaued(policy.window, policy.rel_improve)) {
      if (state.phase == Phase::One) advance(Phase::Two);
      else if (allow_phase_three && state.phase == Phase::Two) advance(Phase::Three);
    }
    break;
  }
  return state;
}

} // namespace oqr
