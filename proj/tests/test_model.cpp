#include <cmath>

#include "doctest.h"

#include "oqr/errors.hpp"
#include "oqr/model.hpp"
#include "oqr/rng.hpp"

using namespace oqr;

namespace {

Vector vec(std::initializer_list<double> xs)
{
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

BatchData random_batch(Index n, Index d, RngStream &rng)
{
  BatchData::RowMatrix x(n, d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) x(i, k) = rng.standard_normal();
    y(i) = rng.standard_normal();
  }
  return BatchData(x, y);
}

Vector random_vector(Index d, RngStream &rng, double scale = 1.0)
{
  Vector v(d);
  for (Index k = 0; k < d; ++k) v(k) = scale * rng.standard_normal();
  return v;
}

} // namespace

TEST_CASE("quantile level validation")
{
  CHECK(QuantileLevel(0.3).tau_bar() == doctest::Approx(0.7));
  CHECK(QuantileLevel(0.5).tau_bar() == 0.5);
  CHECK_THROWS_AS(QuantileLevel(0.0), ConfigError);
  CHECK_THROWS_AS(QuantileLevel(1.0), ConfigError);
  CHECK_THROWS_AS(QuantileLevel(-0.2), ConfigError);
}

TEST_CASE("check loss examples")
{
  CHECK(check_loss(QuantileLevel(0.5), 2.0) == 1.0);
  CHECK(check_loss(QuantileLevel(0.25), -4.0) == 3.0);
  CHECK(check_loss(QuantileLevel(0.9), 0.0) == 0.0);
  CHECK(check_loss(QuantileLevel(0.5), 2.0f) == 1.0f);
}

TEST_CASE("check loss is convex, positively homogeneous and zero only at zero")
{
  RngStream rng(1);
  for (int i = 0; i < 20000; ++i) {
    QuantileLevel q(0.01 + 0.98 * rng.uniform01());
    double const a = 5.0 * rng.standard_normal(), b = 5.0 * rng.standard_normal();
    double const lam = rng.uniform01();
    CHECK(check_loss(q, lam * a + (1 - lam) * b) <=
          lam * check_loss(q, a) + (1 - lam) * check_loss(q, b) + 1e-12);
    double const c = 0.1 + 3.0 * rng.uniform01();
    CHECK(check_loss(q, c * a) == doctest::Approx(c * check_loss(q, a)).epsilon(1e-12));
    CHECK(check_loss(q, a) > 0.0);
  }
}

TEST_CASE("point sub-gradient examples")
{
  Vector g = subgrad_point(QuantileLevel(0.5), Observation{vec({1, 0}), 1.0}, vec({0, 0}));
  CHECK(g(0) == -0.5);
  CHECK(g(1) == 0.0);

  g = subgrad_point(QuantileLevel(0.25), Observation{vec({2}), 0.0}, vec({1}));
  CHECK(g(0) == 1.5);

  Vector const x = vec({1.5, -2.0});
  Vector const beta = vec({2.0, 0.5});
  g = subgrad_point(QuantileLevel(0.7), Observation{x, x.dot(beta)}, beta);
  CHECK(g.norm() == 0.0);

  CHECK_THROWS_AS(subgrad_point(QuantileLevel(0.5), Observation{vec({1, 2}), 0.0}, vec({1})),
                  ConfigError);
}

TEST_CASE("sub-gradient norm never exceeds tau_bar |x|")
{
  RngStream rng(2);
  for (int i = 0; i < 10000; ++i) {
    QuantileLevel q(0.01 + 0.98 * rng.uniform01());
    Index const d = 1 + static_cast<Index>(rng.next_u64() % 10);
    Observation obs{random_vector(d, rng), rng.standard_normal()};
    Vector const beta = random_vector(d, rng);
    CHECK(subgrad_point(q, obs, beta).norm() <= q.tau_bar() * obs.x.norm() * (1 + 1e-15));
  }
}

TEST_CASE("mean sub-gradient")
{
  QuantileLevel const q(0.5);
  RngStream rng(3);
  auto const one = random_batch(1, 3, rng);
  Vector const beta = random_vector(3, rng);
  CHECK((subgrad_mean(q, one, beta) - subgrad_point(q, one.observation(0), beta)).norm() == 0.0);

  BatchData pair(1);
  pair.push_back({vec({1}), 1.0});
  pair.push_back({vec({1}), -1.0});
  CHECK(subgrad_mean(q, pair, vec({0}))(0) == 0.0);

  CHECK_THROWS_AS(subgrad_mean(q, BatchData(2), vec({0, 0})), ConfigError);
}

TEST_CASE("sub-gradient inequality on random batches")
{
  RngStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    QuantileLevel q(0.05 + 0.9 * rng.uniform01());
    auto const batch = random_batch(20, 4, rng);
    Vector const beta = random_vector(4, rng);
    Vector const g = subgrad_mean(q, batch, beta);
    double const f = empirical_loss(q, batch, beta);
    double worst = 0.0;
    for (int i = 0; i < 10000 / 20; ++i) {
      Vector const other = random_vector(4, rng, 3.0);
      worst = std::min(worst, empirical_loss(q, batch, other) - f - g.dot(other - beta));
    }
    CHECK(worst >= -1e-12);
  }
}

TEST_CASE("empirical loss")
{
  QuantileLevel const q(0.5);
  BatchData fit(2);
  Vector const beta = vec({1.0, -1.0});
  fit.push_back({vec({1, 2}), -1.0});
  fit.push_back({vec({3, 1}), 2.0});
  CHECK(empirical_loss(q, fit, beta) == 0.0);

  BatchData one(1);
  one.push_back({vec({1}), 2.0});
  CHECK(empirical_loss(q, one, vec({0})) == 1.0);

  RngStream rng(5);
  QuantileLevel const q3(0.3);
  auto const batch = random_batch(7, 3, rng);
  Vector const b = random_vector(3, rng);
  double brute = 0.0;
  for (Index i = 0; i < batch.size(); ++i) {
    double const r = batch.y()(i) - batch.x().row(i).dot(b);
    brute += r >= 0 ? 0.3 * r : -0.7 * r;
  }
  CHECK(empirical_loss(q3, batch, b) == doctest::Approx(brute / 7.0).epsilon(1e-14));
  CHECK_THROWS_AS(empirical_loss(q, BatchData(1), vec({0})), ConfigError);
}

TEST_CASE("excess loss")
{
  QuantileLevel const q(0.4);
  RngStream rng(6);
  auto const batch = random_batch(10, 3, rng);
  Vector const star = random_vector(3, rng);
  Vector const b1 = random_vector(3, rng), b2 = random_vector(3, rng);
  CHECK(excess_loss(q, batch, star, star) == 0.0);
  CHECK(excess_loss(q, batch, b1, star) - excess_loss(q, batch, b2, star) ==
        doctest::Approx(empirical_loss(q, batch, b1) - empirical_loss(q, batch, b2)));

  // Fresh batches from y = x'beta* + noise with zero median: positive on average.
  Vector const beta = star + vec({0.5, -0.5, 0.2});
  double s = 0.0, s2 = 0.0;
  int const reps = 10000;
  QuantileLevel const med(0.5);
  for (int r = 0; r < reps; ++r) {
    BatchData b(3);
    for (int i = 0; i < 5; ++i) {
      Vector const x = random_vector(3, rng);
      b.push_back({x, x.dot(star) + rng.standard_normal()});
    }
    double const v = excess_loss(med, b, beta, star);
    s += v;
    s2 += v * v;
  }
  double const m = s / reps;
  double const se = std::sqrt((s2 / reps - m * m) / reps);
  CHECK(m - 3.0 * se > 0.0);
}

TEST_CASE("squared loss gradient")
{
  Vector const beta = vec({1.0, 2.0});
  Vector const x = vec({0.5, 1.0});
  CHECK(squared_loss_grad({x, x.dot(beta)}, beta).norm() == 0.0);
  CHECK(squared_loss_grad({vec({1}), 3.0}, vec({1}))(0) == -4.0);

  RngStream rng(7);
  for (int i = 0; i < 50; ++i) {
    Observation obs{random_vector(4, rng), rng.standard_normal()};
    Vector const b = random_vector(4, rng);
    Vector const g = squared_loss_grad(obs, b);
    double const h = 1e-5;
    for (Index k = 0; k < 4; ++k) {
      Vector up = b, down = b;
      up(k) += h;
      down(k) -= h;
      double const fd = (squared_loss(obs, up) - squared_loss(obs, down)) / (2 * h);
      CHECK(std::abs(fd - g(k)) <= 1e-6);
    }
  }
  CHECK_THROWS_AS(squared_loss_grad({vec({1, 2}), 0.0}, vec({1})), ConfigError);
}

TEST_CASE("batch data bookkeeping")
{
  BatchData b(2);
  CHECK(b.empty());
  for (int i = 0; i < 100; ++i) b.push_back({vec({double(i), 1.0}), double(i)});
  CHECK(b.size() == 100);
  CHECK(b.observation(57).y == 57.0);
  CHECK(b.observation(57).x(0) == 57.0);
  BatchData c(2);
  c.push_back({vec({-1, -1}), -1.0});
  b.append(c);
  CHECK(b.size() == 101);
  CHECK(b.y()(100) == -1.0);
  CHECK_THROWS_AS(b.push_back({vec({1}), 0.0}), ConfigError);
  CHECK_THROWS_AS(b.push_back({vec({1, NAN}), 0.0}), ConfigError);
}
