#pragma once

// Stepsize laws and the phase controller.
//
//   one-sample : geometric (phase one) -> inverse time with offset Cb*d (phase two)
//   batch      : geometric -> constant -> inverse time with offset Cb (phase three)
//   infinite   : geometric with the fixed 1 - C_l/(100 C_u) rate -> constant
//   least sq.  : constant c/d -> c'/(t - t1 + d)

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

namespace oqr {

enum class Phase { One = 1, Two = 2, Three = 3 };
std::string to_string(Phase p);

struct PhaseState
{
  Phase phase = Phase::One;
  std::optional<std::int64_t> t1;
  std::optional<std::int64_t> t2;
};

enum class Mode { OnlineOneSample, Batch, InfiniteStorage, LeastSquares };
std::string to_string(Mode m);
Mode mode_from_string(std::string const &s);

struct ScheduleConfig
{
  Mode mode = Mode::OnlineOneSample;
  double eta0 = 0.1;
  double geo_rate = 0.99;
  double const_eta = 1.0;
  double ca = 20.0;
  double cb = 30.0;
  double b0_over_cl = 1.0;
  std::int64_t d = 1;
  bool offset_scales_with_d = true;
  double c_l = 1.0;
  double c_u = 1.0;
  double d0 = 1.0;
  double ls_c = 0.25;
  double ls_c2 = 1.0;
  /// Pins the stepsize to `const_eta` in every phase (the constant baseline).
  bool constant_only = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// eta0 = C sqrt(C_l) / (C_u tau_bar^2) * D0 / d
double theory_eta0_online(double c, double c_l, double c_u, double tau_bar, double d0, double d);
/// 1 - c5 (C_l / C_u) / (d tau_bar^2)
double theory_geo_rate_online(double c5, double c_l, double c_u, double tau_bar, double d);
/// eta0 = C sqrt(C_l) / C_u * D0
double theory_eta0_batch(double c, double c_l, double c_u, double d0);
/// 1 - c C_l / C_u
double theory_geo_rate_batch(double c, double c_l, double c_u);
/// (C_l / C_u^2) (b1^2 / b0) * c
double theory_constant_eta(double c, double c_l, double c_u, double b0, double b1);

double eta_phase1_geometric(std::int64_t t, ScheduleConfig const &cfg);
double eta_phase2_inverse_time(std::int64_t t, std::int64_t t_start, ScheduleConfig const &cfg);
double eta_constant(ScheduleConfig const &cfg);
double eta_infinite_phase1(std::int64_t t, ScheduleConfig const &cfg);
double eta_least_squares(std::int64_t t, PhaseState const &phase, ScheduleConfig const &cfg);

/// Dispatches on mode and phase.
double step_size(ScheduleConfig const &cfg, PhaseState const &phase, std::int64_t t);

struct SwitchPolicy
{
  enum class Kind { OracleRadius, FixedIteration, PlateauDetect };

  Kind kind = Kind::OracleRadius;
  std::int64_t t1 = 0;
  std::optional<std::int64_t> t2;
  std::int64_t window = 100;
  double rel_improve = 0.01;

  static SwitchPolicy oracle_radius() { return {}; }
  static SwitchPolicy fixed_iteration(std::int64_t t1, std::optional<std::int64_t> t2 = {});
  static SwitchPolicy plateau_detect(std::int64_t window, double rel_improve);
  /// t1 = ceil(alpha * d * log(D0 / gamma)), clamped at 0.
  static SwitchPolicy fixed_from_theory(double alpha, double d, double d0, double gamma);

  void validate() const;
};

std::string to_string(SwitchPolicy::Kind k);

/// Error radii at which the oracle policy advances a phase.
struct SwitchThresholds
{
  /// One -> Two when ||beta_t - beta*|| < radius.
  double radius = 0.0;
  /// Two -> Three (batch only) when ||beta_t - beta*|| <= batch_boundary.
  double batch_boundary = 0.0;
};

/// radius = radius_factor * C_l^{-1/2} * gamma;
/// batch_boundary = c1 * C_u^{1/2} / C_l * tau_bar * sqrt(d / n) * b0.
SwitchThresholds make_thresholds(double gamma, double c_l, double c_u, double tau_bar, double d,
                                 double n, double b0, double radius_factor = 8.0, double c1 = 1.0);

/// Windowed mean of an observable per-step signal (the step loss); reports a
/// plateau when two consecutive full windows improve by less than the
/// requested fraction.
class PlateauMonitor
{
public:
  PlateauMonitor() = default;
  /// Keeps at most `keep` recent values (0 keeps everything).
  explicit PlateauMonitor(std::size_t keep)
    : keep_(keep)
  {
  }

  void record(double value);
  bool plateaued(std::int64_t window, double rel_improve) const;
  void reset();
  std::int64_t count() const { return count_; }

private:
  std::deque<double> values_;
  std::size_t keep_ = 0;
  std::int64_t count_ = 0;
};

/// Returns the (possibly advanced) phase state. Never moves to an earlier
/// phase; t1/t2 are recorded by the first switch that sets them.
PhaseState should_switch(SwitchPolicy const &policy, PhaseState state, std::int64_t t,
                         std::optional<double> err, SwitchThresholds const &thresholds,
                         bool allow_phase_three, PlateauMonitor const *monitor = nullptr);

} // namespace oqr
