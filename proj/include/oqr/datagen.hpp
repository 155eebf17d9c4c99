#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "oqr/model.hpp"
#include "oqr/numkit.hpp"
#include "oqr/rng.hpp"

namespace oqr {

struct Gaussian
{
  double sigma = 1.0;
};

struct StudentT
{
  double nu = 1.1;
  double scale = 1.0;
};

using NoiseFamily = std::variant<Gaussian, StudentT>;

/// Location-shifted noise: xi = raw - shift, where `shift` is the tau-quantile
/// of the raw (centred) distribution, so P(xi < 0) = tau.
struct NoiseSpec
{
  NoiseFamily family;
  QuantileLevel tau{0.5};
  double shift = 0.0;
};

double tau_shift(NoiseFamily const &family, QuantileLevel const &tau);
NoiseSpec make_noise(NoiseFamily const &family, QuantileLevel const &tau);

/// E|xi|, closed form for both families (the heavy-tailed one needs nu > 1).
double mean_abs(NoiseSpec const &noise);
double noise_density(NoiseSpec const &noise, double x);
double noise_cdf(NoiseSpec const &noise, double x);
double sample_noise(NoiseSpec const &noise, RngStream &rng);

enum class CovarianceKind { Identity, Diagonal, Full };

struct CovariateSpec
{
  Index dim = 0;
  CovarianceKind kind = CovarianceKind::Identity;
  Matrix sigma;
  CholeskyFactor<double> factor;
  double c_l = 1.0;
  double c_u = 1.0;

  static CovariateSpec identity(Index dim);
  static CovariateSpec diagonal(Vector const &values);
  static CovariateSpec full(Matrix const &sigma);
};

struct GroundTruth
{
  Vector beta_star;
  double snr = 0.0;
};

struct ScaleConstants
{
  double gamma = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
};

struct DensityBounds
{
  double b0 = 0.0;
  double b1 = 0.0;
};

/// b1 = 1 / sup density; b0 = 1 / inf density over |x| <= 8 sqrt(c_u/c_l) gamma,
/// scanned on a 10^4-point grid plus the endpoints. Throws std::overflow_error
/// when the infimum underflows.
DensityBounds density_bounds(NoiseSpec const &noise, double gamma, double c_l, double c_u);
ScaleConstants scale_constants(NoiseSpec const &noise, CovariateSpec const &cov);

Vector sample_covariate(CovariateSpec const &cov, RngStream &rng);
Observation sample_observation(CovariateSpec const &cov, GroundTruth const &truth,
                               NoiseSpec const &noise, RngStream &rng);

enum class Direction { RandomUnit, AllOnes };

GroundTruth make_truth(CovariateSpec const &cov, double snr, Direction direction, double gamma,
                       RngStream &rng);

/// Lazily generated sequence of independent batches. Owns its RNG stream.
class BatchStream
{
public:
  BatchStream(CovariateSpec cov, GroundTruth truth, NoiseSpec noise,
              std::vector<std::int64_t> batch_sizes, RngStream rng);

  bool done() const { return next_ >= sizes_.size(); }
  std::size_t remaining() const { return sizes_.size() - next_; }
  std::size_t batches() const { return sizes_.size(); }
  BatchData next();

private:
  CovariateSpec cov_;
  GroundTruth truth_;
  NoiseSpec noise_;
  std::vector<std::int64_t> sizes_;
  std::size_t next_ = 0;
  RngStream rng_;
};

BatchStream gen_batches(CovariateSpec const &cov, GroundTruth const &truth,
                        NoiseSpec const &noise, std::vector<std::int64_t> batch_sizes,
                        RngStream rng);

} // namespace oqr
