#include <cmath>

#include "doctest.h"

#include "oqr/errors.hpp"
#include "oqr/schedules.hpp"

using namespace oqr;

namespace {

ScheduleConfig online(std::int64_t d)
{
  ScheduleConfig c;
  c.mode = Mode::OnlineOneSample;
  c.d = d;
  return c;
}

} // namespace

TEST_CASE("geometric phase one")
{
  auto c = online(100);
  c.eta0 = 0.1;
  c.geo_rate = 1.0 - 0.5 / 100;
  CHECK(eta_phase1_geometric(0, c) == doctest::Approx(0.1));
  CHECK(eta_phase1_geometric(2, c) == doctest::Approx(0.0990025).epsilon(1e-12));
  c.geo_rate = 0.9;
  double prev = eta_phase1_geometric(0, c);
  for (std::int64_t t = 1; t < 2000; ++t) {
    double const e = eta_phase1_geometric(t, c);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-80);
}

TEST_CASE("inverse-time phase")
{
  auto c = online(100);
  c.ca = 15;
  c.cb = 20;
  c.b0_over_cl = 1;
  CHECK(eta_phase2_inverse_time(500, 500, c) == doctest::Approx(0.0075));
  c.ca = 20;
  c.cb = 30;
  CHECK(eta_phase2_inverse_time(1700, 700, c) == doctest::Approx(0.005));
  double const a = eta_phase2_inverse_time(1000, 0, c);  // offset 3000 + 1000
  double const b = eta_phase2_inverse_time(5000, 0, c);  // 8000
  CHECK(a / b == doctest::Approx(2.0));
  for (std::int64_t t = 0; t < 5000; t += 37) {
    CHECK(eta_phase2_inverse_time(t, 0, c) * (t + 3000.0) == doctest::Approx(20.0));
  }

  c.offset_scales_with_d = false;
  CHECK(eta_phase2_inverse_time(10, 10, c) == doctest::Approx(20.0 / 30.0));
  CHECK_THROWS_AS(eta_phase2_inverse_time(0, 100, c), ConfigError);
}

TEST_CASE("constant and infinite-storage laws")
{
  ScheduleConfig c;
  c.const_eta = theory_constant_eta(0.1, 1.0, 1.0, 1.0, 1.0);
  CHECK(c.const_eta == doctest::Approx(0.1));
  CHECK(eta_constant(c) == eta_constant(c));
  c.constant_only = true;
  PhaseState ps;
  CHECK(step_size(c, ps, 0) == step_size(c, ps, 1000));
  c.const_eta = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  ScheduleConfig inf;
  inf.mode = Mode::InfiniteStorage;
  inf.d0 = 8.0;
  CHECK(eta_infinite_phase1(0, inf) == doctest::Approx(1.0));
  CHECK(eta_infinite_phase1(1, inf) == doctest::Approx(0.99));
  for (std::int64_t t = 0; t < 100; ++t) {
    CHECK(eta_infinite_phase1(t + 1, inf) / eta_infinite_phase1(t, inf) == doctest::Approx(0.99));
  }
}

TEST_CASE("least squares law")
{
  auto c = online(100);
  c.mode = Mode::LeastSquares;
  PhaseState one;
  CHECK(eta_least_squares(5, one, c) == doctest::Approx(0.0025));
  PhaseState two{Phase::Two, 40, std::nullopt};
  CHECK(eta_least_squares(40, two, c) == doctest::Approx(1.0 / 100));
  CHECK(eta_least_squares(140, two, c) / eta_least_squares(340, two, c) == doctest::Approx(2.0));
}

TEST_CASE("theory presets")
{
  CHECK(theory_eta0_online(2.0, 1.0, 1.0, 0.5, 10.0, 20.0) == doctest::Approx(4.0));
  CHECK(theory_geo_rate_online(0.05, 1.0, 1.0, 0.5, 20.0) == doctest::Approx(1.0 - 0.01));
  CHECK(theory_eta0_batch(2.0, 4.0, 2.0, 3.0) == doctest::Approx(6.0));
  CHECK(theory_geo_rate_batch(0.05, 1.0, 2.0) == doctest::Approx(0.975));
}

TEST_CASE("stepsizes stay positive over a long horizon")
{
  for (Mode m : {Mode::OnlineOneSample, Mode::Batch, Mode::InfiniteStorage, Mode::LeastSquares}) {
    ScheduleConfig c = online(20);
    c.mode = m;
    c.geo_rate = 0.99999;
    c.offset_scales_with_d = m == Mode::OnlineOneSample;
    for (Phase p : {Phase::One, Phase::Two, Phase::Three}) {
      PhaseState ps{p, 0, 0};
      for (std::int64_t t : {0LL, 1LL, 1000LL, 100000LL, 10000000LL}) {
        // The storage schedule decays at a fixed rate and underflows on purpose.
        if (m == Mode::InfiniteStorage && p == Phase::One && t > 10000) continue;
        CHECK(step_size(c, ps, t) > 0.0);
      }
    }
  }
}

TEST_CASE("config validation names fields")
{
  ScheduleConfig c;
  c.geo_rate = 1.0;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (ConfigError const &e) {
    CHECK(std::string(e.what()).find("geo_rate") != std::string::npos);
  }
  c.geo_rate = 0.9;
  c.ca = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("oracle radius switching")
{
  auto const th = make_thresholds(1.0, 1.0, 1.0, 0.5, 10, 100, 1.0);
  CHECK(th.radius == doctest::Approx(8.0));
  CHECK(th.batch_boundary == doctest::Approx(0.5 * std::sqrt(0.1)));
  auto const policy = SwitchPolicy::oracle_radius();
  PhaseState s;
  s = should_switch(policy, s, 3, 8.1, th, false);
  CHECK(s.phase == Phase::One);
  s = should_switch(policy, s, 4, 7.9, th, false);
  CHECK(s.phase == Phase::Two);
  CHECK(s.t1 == 4);
  s = should_switch(policy, s, 5, 50.0, th, false);
  CHECK(s.phase == Phase::Two);
  CHECK(s.t1 == 4);
  s = should_switch(policy, s, 6, 0.01, th, false);
  CHECK(s.phase == Phase::Two);
  s = should_switch(policy, s, 7, 0.01, th, true);
  CHECK(s.phase == Phase::Three);
  CHECK(s.t2 == 7);
  CHECK_THROWS_AS(should_switch(policy, PhaseState{}, 0, std::nullopt, th, false), ConfigError);
}

TEST_CASE("fixed iteration switching")
{
  SwitchThresholds th{1.0, 0.1};
  auto const p = SwitchPolicy::fixed_iteration(500, 800);
  PhaseState s;
  s = should_switch(p, s, 499, std::nullopt, th, true);
  CHECK(s.phase == Phase::One);
  s = should_switch(p, s, 500, std::nullopt, th, true);
  CHECK(s.phase == Phase::Two);
  CHECK(s.t1 == 500);
  s = should_switch(p, s, 800, std::nullopt, th, true);
  CHECK(s.phase == Phase::Three);
  CHECK(s.t2 == 800);

  auto const theory = SwitchPolicy::fixed_from_theory(2.0, 10.0, std::exp(3.0), 1.0);
  CHECK(theory.t1 == 60);
  CHECK(SwitchPolicy::fixed_from_theory(2.0, 10.0, 0.5, 1.0).t1 == 0);
  CHECK_THROWS_AS(SwitchPolicy::fixed_iteration(-1), ConfigError);
}

TEST_CASE("plateau detection")
{
  SwitchThresholds th{1.0, 0.1};
  auto const p = SwitchPolicy::plateau_detect(50, 0.01);
  PlateauMonitor mon(200);
  PhaseState s;
  // A flat signal never switches before a full window has elapsed.
  for (std::int64_t t = 0; t < 200; ++t) {
    s = should_switch(p, s, t, std::nullopt, th, false, &mon);
    if (t < 50) CHECK(s.phase == Phase::One);
    mon.record(1.0);
  }
  CHECK(s.phase == Phase::Two);
  CHECK(*s.t1 >= 50);

  PlateauMonitor falling(0);
  for (int i = 0; i < 200; ++i) falling.record(std::pow(0.9, i));
  CHECK_FALSE(falling.plateaued(50, 0.01));
  falling.reset();
  CHECK(falling.count() == 0);
}
