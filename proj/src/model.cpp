#include "oqr/model.hpp"

#include <string>

namespace oqr {

namespace {

void require_nonempty(BatchData const &batch, char const *what)
{
  if (batch.empty()) throw ConfigError(std::string(what) + ": empty batch");
}

void require_dim(BatchData const &batch, Vector const &beta, char const *what)
{
  if (batch.dim() != beta.size()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (batch " +
                      std::to_string(batch.dim()) + ", beta " + std::to_string(beta.size()) + ")");
  }
}

} // namespace

QuantileLevel::QuantileLevel(double tau)
  : tau_(tau)
{
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("quantile level must lie in (0,1), got " + std::to_string(tau));
  }
}

BatchData::BatchData(Index dim)
  : dim_(dim)
{
}

BatchData::BatchData(RowMatrix x, Vector y)
  : x_(std::move(x))
  , y_(std::move(y))
  , n_(x_.rows())
  , dim_(x_.cols())
{
  if (y_.size() != x_.rows()) throw ConfigError("BatchData: x rows and y length differ");
  if (!x_.allFinite() || !y_.allFinite()) throw ConfigError("BatchData: non-finite data");
}

BatchData BatchData::from_observations(std::vector<Observation> const &obs)
{
  if (obs.empty()) return BatchData{};
  BatchData b(obs.front().x.size());
  b.reserve(static_cast<Index>(obs.size()));
  for (auto const &o : obs) b.push_back(o);
  return b;
}

void BatchData::reserve(Index rows)
{
  if (rows <= x_.rows()) return;
  Index cap = std::max<Index>(rows, 2 * x_.rows());
  x_.conservativeResize(cap, dim_);
  y_.conservativeResize(cap);
}

void BatchData::push_back(Observation const &obs)
{
  if (n_ == 0 && dim_ == 0) dim_ = obs.x.size();
  if (obs.x.size() != dim_) throw ConfigError("BatchData: covariate dimension mismatch");
  if (!obs.x.allFinite() || !std::isfinite(obs.y)) throw ConfigError("BatchData: non-finite data");
  reserve(n_ + 1);
  x_.row(n_) = obs.x.transpose();
  y_(n_) = obs.y;
  ++n_;
}

void BatchData::append(BatchData const &other)
{
  if (other.empty()) return;
  if (n_ == 0 && dim_ == 0) dim_ = other.dim();
  if (other.dim() != dim_) throw ConfigError("BatchData: covariate dimension mismatch");
  reserve(n_ + other.size());
  x_.middleRows(n_, other.size()) = other.x();
  y_.segment(n_, other.size()) = other.y();
  n_ += other.size();
}

Vector subgrad_mean(QuantileLevel const &q, BatchData const &batch, Vector const &beta)
{
  require_nonempty(batch, "subgrad_mean");
  require_dim(batch, beta, "subgrad_mean");
  Vector const r = batch.y() - batch.x() * beta;
  Vector const w = r.unaryExpr([&](double v) { return check_coefficient(q, v); });
  return batch.x().transpose() * w / static_cast<double>(batch.size());
}

double empirical_loss(QuantileLevel const &q, BatchData const &batch, Vector const &beta)
{
  require_nonempty(batch, "empirical_loss");
  require_dim(batch, beta, "empirical_loss");
  Vector const r = batch.y() - batch.x() * beta;
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += check_loss(q, r(i));
  return s / static_cast<double>(batch.size());
}

double excess_loss(QuantileLevel const &q, BatchData const &batch, Vector const &beta,
                   Vector const &beta_star)
{
  return empirical_loss(q, batch, beta) - empirical_loss(q, batch, beta_star);
}

double squared_loss_mean(BatchData const &batch, Vector const &beta)
{
  require_nonempty(batch, "squared_loss_mean");
  require_dim(batch, beta, "squared_loss_mean");
  return (batch.y() - batch.x() * beta).squaredNorm() / static_cast<double>(batch.size());
}

Vector squared_loss_grad_mean(BatchData const &batch, Vector const &beta)
{
  require_nonempty(batch, "squared_loss_grad_mean");
  require_dim(batch, beta, "squared_loss_grad_mean");
  Vector const r = batch.y() - batch.x() * beta;
  return (-2.0 / static_cast<double>(batch.size())) * (batch.x().transpose() * r);
}

} // namespace oqr
