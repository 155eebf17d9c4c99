#pragma once

// Check (pinball) loss, squared loss and their (sub)gradients.
//
// Sign convention for a residual r = y - <x, beta>:
//   r > 0  ->  coefficient -tau
//   r < 0  ->  coefficient 1 - tau
//   r == 0 ->  coefficient 0   (a valid element of [-tau, 1 - tau])

#include <algorithm>
#include <vector>

#include "oqr/numkit.hpp"

namespace oqr {

class QuantileLevel
{
public:
  explicit QuantileLevel(double tau);

  double tau() const { return tau_; }
  /// max(tau, 1 - tau); bounds the magnitude of any sub-gradient coefficient.
  double tau_bar() const { return std::max(tau_, 1.0 - tau_); }

private:
  double tau_;
};

struct Observation
{
  Vector x;
  double y = 0.0;
};

/// A batch of observations stored row-wise: row i of `x()` is the covariate
/// of observation i. Appending grows capacity geometrically, so the batch can
/// double as the append-only store of the infinite-storage learner.
class BatchData
{
public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BatchData() = default;
  explicit BatchData(Index dim);
  BatchData(RowMatrix x, Vector y);
  static BatchData from_observations(std::vector<Observation> const &obs);

  Index size() const { return n_; }
  Index dim() const { return dim_; }
  bool empty() const { return n_ == 0; }

  auto x() const { return x_.topRows(n_); }
  auto y() const { return y_.head(n_); }
  Observation observation(Index i) const { return {x_.row(i).transpose(), y_(i)}; }

  void push_back(Observation const &obs);
  void append(BatchData const &other);

private:
  void reserve(Index rows);

  RowMatrix x_;
  Vector y_;
  Index n_ = 0;
  Index dim_ = 0;
};

template <typename Scalar> Scalar check_loss(QuantileLevel const &q, Scalar r)
{
  Scalar const tau = static_cast<Scalar>(q.tau());
  return r >= Scalar(0) ? tau * r : (tau - Scalar(1)) * r;
}

template <typename Scalar> Scalar check_coefficient(QuantileLevel const &q, Scalar r)
{
  Scalar const tau = static_cast<Scalar>(q.tau());
  if (r > Scalar(0)) return -tau;
  if (r < Scalar(0)) return Scalar(1) - tau;
  return Scalar(0);
}

/// A sub-gradient of beta -> rho_tau(y - <x, beta>).
template <typename A, typename B>
Vec<typename A::Scalar> subgrad_point(QuantileLevel const &q, Eigen::MatrixBase<A> const &x,
                                      typename A::Scalar y, Eigen::MatrixBase<B> const &beta)
{
  auto const r = y - dot(x, beta);
  return check_coefficient(q, r) * x;
}

inline Vector subgrad_point(QuantileLevel const &q, Observation const &obs, Vector const &beta)
{
  return subgrad_point(q, obs.x, obs.y, beta);
}

Vector subgrad_mean(QuantileLevel const &q, BatchData const &batch, Vector const &beta);
double empirical_loss(QuantileLevel const &q, BatchData const &batch, Vector const &beta);
double excess_loss(QuantileLevel const &q, BatchData const &batch, Vector const &beta,
                   Vector const &beta_star);

inline double squared_loss(Observation const &obs, Vector const &beta)
{
  double const r = obs.y - dot(obs.x, beta);
  return r * r;
}

/// -2 (y - <x, beta>) x
inline Vector squared_loss_grad(Observation const &obs, Vector const &beta)
{
  double const r = obs.y - dot(obs.x, beta);
  return (-2.0 * r) * obs.x;
}

double squared_loss_mean(BatchData const &batch, Vector const &beta);
Vector squared_loss_grad_mean(BatchData const &batch, Vector const &beta);

} // namespace oqr
