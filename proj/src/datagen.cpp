#include "oqr/datagen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "oqr/special.hpp"

namespace oqr {

namespace {

template <class... Ts> struct overloaded : Ts...
{
  using Ts::operator()...;
};

void validate(NoiseFamily const &family)
{
  std::visit(overloaded{[](Gaussian const &g) {
                          if (!(g.sigma > 0.0)) throw ConfigError("gaussian noise: sigma must be > 0");
                        },
                        [](StudentT const &t) {
                          if (!(t.nu > 1.0)) {
                            throw ConfigError("student_t noise: nu must be > 1 (E|xi| is infinite "
                                              "otherwise), got " + std::to_string(t.nu));
                          }
                          if (!(t.scale > 0.0)) throw ConfigError("student_t noise: scale must be > 0");
                        }},
             family);
}

} // namespace

double tau_shift(NoiseFamily const &family, QuantileLevel const &tau)
{
  validate(family);
  return std::visit(overloaded{[&](Gaussian const &g) {
                                 return tau.tau() == 0.5 ? 0.0
                                                         : g.sigma * special::normal_quantile(tau.tau());
                               },
                               [&](StudentT const &t) {
                                 return t.scale * special::student_t_quantile(tau.tau(), t.nu);
                               }},
                    family);
}

NoiseSpec make_noise(NoiseFamily const &family, QuantileLevel const &tau)
{
  return NoiseSpec{family, tau, tau_shift(family, tau)};
}

double mean_abs(NoiseSpec const &noise)
{
  // With m the standardized shift, E|Z - m| = -m + 2 m F(m) - 2 E[Z; Z < m].
  return std::visit(overloaded{[&](Gaussian const &g) {
                                 double const m = noise.shift / g.sigma;
                                 return g.sigma * (m * (2.0 * special::normal_cdf(m) - 1.0) +
                                                   2.0 * special::normal_pdf(m));
                               },
                               [&](StudentT const &t) {
                                 double const m = noise.shift / t.scale;
                                 double const nu = t.nu;
                                 double const partial = (nu + m * m) / (nu - 1.0) *
                                                        special::student_t_pdf(m, nu);
                                 return t.scale * (m * (2.0 * special::student_t_cdf(m, nu) - 1.0) +
                                                   2.0 * partial);
                               }},
                    noise.family);
}

double noise_density(NoiseSpec const &noise, double x)
{
  return std::visit(overloaded{[&](Gaussian const &g) {
                                 return special::normal_pdf((x + noise.shift) / g.sigma) / g.sigma;
                               },
                               [&](StudentT const &t) {
                                 return special::student_t_pdf((x + noise.shift) / t.scale, t.nu) /
                                        t.scale;
                               }},
                    noise.family);
}

double noise_cdf(NoiseSpec const &noise, double x)
{
  return std::visit(overloaded{[&](Gaussian const &g) {
                                 return special::normal_cdf((x + noise.shift) / g.sigma);
                               },
                               [&](StudentT const &t) {
                                 return special::student_t_cdf((x + noise.shift) / t.scale, t.nu);
                               }},
                    noise.family);
}

double sample_noise(NoiseSpec const &noise, RngStream &rng)
{
  return std::visit(overloaded{[&](Gaussian const &g) {
                                 return g.sigma * rng.standard_normal() - noise.shift;
                               },
                               [&](StudentT const &t) {
                                 double const z = rng.standard_normal();
                                 double const v = rng.chi_square(t.nu);
                                 return t.scale * (z / std::sqrt(v / t.nu)) - noise.shift;
                               }},
                    noise.family);
}

DensityBounds density_bounds(NoiseSpec const &noise, double gamma, double c_l, double c_u)
{
  if (!(gamma > 0.0)) throw ConfigError("density_bounds: gamma must be > 0");
  if (!(c_l > 0.0 && c_u >= c_l)) throw ConfigError("density_bounds: need 0 < c_l <= c_u");

  // Both families are unimodal with the mode at -shift.
  double const sup = noise_density(noise, -noise.shift);

  double const radius = 8.0 * std::sqrt(c_u / c_l) * gamma;
  constexpr int grid = 10000;
  double inf = std::min(noise_density(noise, -radius), noise_density(noise, radius));
  for (int i = 0; i <= grid; ++i) {
    double const x = -radius + 2.0 * radius * static_cast<double>(i) / grid;
    inf = std::min(inf, noise_density(noise, x));
  }
  double const b0 = 1.0 / inf;
  if (!(inf > std::numeric_limits<double>::min()) || !std::isfinite(b0)) {
    throw std::overflow_error("density_bounds: noise density underflows on |x| <= " +
                              std::to_string(radius) + " (inf density " + std::to_string(inf) +
                              "); b0 is not representable");
  }
  return {b0, 1.0 / sup};
}

ScaleConstants scale_constants(NoiseSpec const &noise, CovariateSpec const &cov)
{
  double const gamma = mean_abs(noise);
  auto const db = density_bounds(noise, gamma, cov.c_l, cov.c_u);
  return {gamma, db.b0, db.b1};
}

CovariateSpec CovariateSpec::identity(Index dim)
{
  if (dim < 1) throw ConfigError("covariates: dimension must be >= 1");
  CovariateSpec c;
  c.dim = dim;
  c.kind = CovarianceKind::Identity;
  c.sigma = Matrix::Identity(dim, dim);
  c.factor = CholeskyFactor<double>{Matrix::Identity(dim, dim)};
  c.c_l = c.c_u = 1.0;
  return c;
}

CovariateSpec CovariateSpec::diagonal(Vector const &values)
{
  if (values.size() < 1) throw ConfigError("covariates: dimension must be >= 1");
  if (!(values.minCoeff() > 0.0) || !values.allFinite()) {
    throw ConfigError("covariates: diagonal entries must be positive and finite");
  }
  CovariateSpec c;
  c.dim = values.size();
  c.kind = CovarianceKind::Diagonal;
  c.sigma = values.asDiagonal();
  c.factor = CholeskyFactor<double>{Matrix(values.cwiseSqrt().asDiagonal())};
  c.c_l = values.minCoeff();
  c.c_u = values.maxCoeff();
  return c;
}

CovariateSpec CovariateSpec::full(Matrix const &sigma)
{
  CovariateSpec c;
  c.factor = cholesky(sigma);
  c.dim = sigma.rows();
  c.kind = CovarianceKind::Full;
  c.sigma = sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
  c.c_l = es.eigenvalues().minCoeff();
  c.c_u = es.eigenvalues().maxCoeff();
  return c;
}

Vector sample_covariate(CovariateSpec const &cov, RngStream &rng)
{
  Vector z(cov.dim);
  for (Index i = 0; i < cov.dim; ++i) z(i) = rng.standard_normal();
  switch (cov.kind) {
  case CovarianceKind::Identity: return z;
  case CovarianceKind::Diagonal: return cov.factor.L.diagonal().cwiseProduct(z);
  case CovarianceKind::Full: break;
  }
  return cov.factor.L.triangularView<Eigen::Lower>() * z;
}

Observation sample_observation(CovariateSpec const &cov, GroundTruth const &truth,
                               NoiseSpec const &noise, RngStream &rng)
{
  if (truth.beta_star.size() != cov.dim) throw ConfigError("sample_observation: dimension mismatch");
  Observation obs;
  obs.x = sample_covariate(cov, rng);
  obs.y = obs.x.dot(truth.beta_star) + sample_noise(noise, rng);
  return obs;
}

GroundTruth make_truth(CovariateSpec const &cov, double snr, Direction direction, double gamma,
                       RngStream &rng)
{
  if (!(snr > 0.0)) throw ConfigError("make_truth: snr must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("make_truth: gamma must be > 0");
  Vector dir(cov.dim);
  if (direction == Direction::AllOnes) {
    dir.setOnes();
  } else {
    do {
      for (Index i = 0; i < cov.dim; ++i) dir(i) = rng.standard_normal();
    } while (dir.norm() == 0.0);
  }
  return GroundTruth{dir * (snr * gamma / dir.norm()), snr};
}

BatchStream::BatchStream(CovariateSpec cov, GroundTruth truth, NoiseSpec noise,
                         std::vector<std::int64_t> batch_sizes, RngStream rng)
  : cov_(std::move(cov))
  , truth_(std::move(truth))
  , noise_(std::move(noise))
  , sizes_(std::move(batch_sizes))
  , rng_(rng)
{
  for (auto n : sizes_) {
    if (n < 1) throw ConfigError("gen_batches: batch sizes must be >= 1, got " + std::to_string(n));
  }
}

BatchData BatchStream::next()
{
  if (done()) throw std::out_of_range("BatchStream: no batches left");
  Index const n = sizes_[next_++];
  BatchData::RowMatrix x(n, cov_.dim);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    auto obs = sample_observation(cov_, truth_, noise_, rng_);
    x.row(i) = obs.x.transpose();
    y(i) = obs.y;
  }
  return BatchData(std::move(x), std::move(y));
}

BatchStream gen_batches(CovariateSpec const &cov, GroundTruth const &truth,
                        NoiseSpec const &noise, std::vector<std::int64_t> batch_sizes,
                        RngStream rng)
{
  return BatchStream(cov, truth, noise, std::move(batch_sizes), rng);
}

} // namespace oqr
