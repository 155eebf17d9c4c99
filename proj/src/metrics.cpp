#include "oqr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace oqr {

double relative_error(Vector const &beta, Vector const &beta_star)
{
  double const denom = beta_star.norm();
  if (!(denom > 0.0)) throw ConfigError("relative_error: beta* must be nonzero");
  if (beta.size() != beta_star.size()) throw ConfigError("relative_error: dimension mismatch");
  return (beta - beta_star).norm() / denom;
}

double regret_increment(QuantileLevel const &q, BatchData const &data_t, Vector const &beta_t,
                        Vector const &beta_star)
{
  return excess_loss(q, data_t, beta_t, beta_star);
}

McEstimate mc_excess_risk(QuantileLevel const &q, Vector const &beta, GroundTruth const &truth,
                          CovariateSpec const &cov, NoiseSpec const &noise, std::int64_t n,
                          RngStream &rng)
{
  if (n < 100) throw ConfigError("mc_excess_risk: need at least 100 draws");
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    auto const obs = sample_observation(cov, truth, noise, rng);
    double const v = check_loss(q, obs.y - obs.x.dot(beta)) -
                     check_loss(q, obs.y - obs.x.dot(truth.beta_star));
    sum += v;
    sum_sq += v * v;
  }
  double const nn = static_cast<double>(n);
  double const mean = sum / nn;
  double const var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

double gaussian_excess_risk_closed_form(double delta_norm, double sigma)
{
  double const d2 = delta_norm * delta_norm;
  if (d2 == 0.0) return 0.0;
  return std::sqrt(2.0 / std::numbers::pi) * d2 / (std::sqrt(d2 + sigma * sigma) + sigma);
}

double quantile_sorted(std::vector<double> const &sorted, double p)
{
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  double const h = p * static_cast<double>(sorted.size() - 1);
  auto const lo = static_cast<std::size_t>(std::floor(h));
  auto const hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EnsembleSummary summarize_ensemble(std::vector<TrajectoryRecord> const &records,
                                   std::int64_t thin)
{
  if (records.empty()) throw ConfigError("summarize_ensemble: empty ensemble");
  if (thin < 1) throw ConfigError("summarize_ensemble: thin must be >= 1");
  std::size_t const len = records.front().rows.size();
  for (auto const &r : records) {
    if (r.rows.size() != len) throw ConfigError("summarize_ensemble: records differ in length");
  }

  EnsembleSummary out;
  out.replications = records.size();
  double const r = static_cast<double>(records.size());
  std::vector<double> errs(records.size());
  std::vector<int> phases(records.size());
  for (std::size_t i = 0; i < len; i += static_cast<std::size_t>(thin)) {
    SummaryRow row;
    row.t = records.front().rows[i].t;
    double err_sum = 0.0, eta_sum = 0.0, reg_sum = 0.0, samples_sum = 0.0, div = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      auto const &src = records[k].rows[i];
      if (src.t != row.t) throw ConfigError("summarize_ensemble: misaligned time index");
      errs[k] = src.rel_err;
      phases[k] = static_cast<int>(src.phase);
      err_sum += src.rel_err;
      eta_sum += src.eta;
      reg_sum += src.regret_cum;
      samples_sum += static_cast<double>(src.samples);
      div += src.diverged ? 1.0 : 0.0;
    }
    std::sort(errs.begin(), errs.end());
    std::sort(phases.begin(), phases.end());
    row.rel_err_mean = err_sum / r;
    row.rel_err_median = quantile_sorted(errs, 0.5);
    row.rel_err_q25 = quantile_sorted(errs, 0.25);
    row.rel_err_q75 = quantile_sorted(errs, 0.75);
    row.eta = eta_sum / r;
    row.phase = static_cast<Phase>(phases[(phases.size() - 1) / 2]);
    row.regret_mean = reg_sum / r;
    row.diverged_frac = div / r;
    row.samples_mean = samples_sum / r;
    out.rows.push_back(row);
  }
  double div = 0.0;
  for (auto const &rec : records) div += rec.diverged() ? 1.0 : 0.0;
  out.divergence_fraction = div / r;
  return out;
}

namespace {

struct FitAt
{
  double sse;
  double b;
  double scale;
};

FitAt fit_at(std::vector<std::pair<double, double>> const &s, double a,
             std::optional<double> fixed_scale)
{
  double const n = static_cast<double>(s.size());
  double fm = 0.0, ym = 0.0;
  for (auto const &[t, y] : s) {
    fm += std::log1p(t / a);
    ym += y;
  }
  fm /= n;
  ym /= n;
  double scale;
  if (fixed_scale) {
    scale = *fixed_scale;
  } else {
    double sfy = 0.0, sff = 0.0;
    for (auto const &[t, y] : s) {
      double const f = std::log1p(t / a) - fm;
      sfy += f * (y - ym);
      sff += f * f;
    }
    scale = sff > 0.0 ? sfy / sff : 0.0;
  }
  double const b = ym - scale * fm;
  double sse = 0.0;
  for (auto const &[t, y] : s) {
    double const e = y - b - scale * std::log1p(t / a);
    sse += e * e;
  }
  return {sse, b, scale};
}

} // namespace

LogRegretFit fit_log_regret(std::vector<std::pair<double, double>> const &series,
                            std::optional<double> fixed_scale)
{
  if (series.size() < 10) throw ConfigError("fit_log_regret: need at least 10 points");
  double t_max = 0.0, ym = 0.0;
  for (auto const &[t, y] : series) {
    if (!(t >= 1.0)) throw ConfigError("fit_log_regret: time points must be >= 1");
    t_max = std::max(t_max, t);
    ym += y;
  }
  ym /= static_cast<double>(series.size());
  double ss_tot = 0.0;
  for (auto const &[t, y] : series) ss_tot += (y - ym) * (y - ym);

  double const lo = 0.0;
  double const hi = std::log(10.0 * t_max);
  auto sse = [&](double u) { return fit_at(series, std::exp(u), fixed_scale).sse; };

  constexpr int grid = 64;
  int best = 0;
  double best_sse = sse(lo);
  for (int i = 1; i <= grid; ++i) {
    double const v = sse(lo + (hi - lo) * i / grid);
    if (v < best_sse) {
      best_sse = v;
      best = i;
    }
  }
  double left = lo + (hi - lo) * std::max(0, best - 1) / grid;
  double right = lo + (hi - lo) * std::min(grid, best + 1) / grid;
  double const phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = right - phi * (right - left), x2 = left + phi * (right - left);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 200 && right - left > 1e-12; ++it) {
    if (f1 <= f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - phi * (right - left);
      f1 = sse(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + phi * (right - left);
      f2 = sse(x2);
    }
  }
  double u = 0.5 * (left + right);
  if (best_sse <= std::min(f1, f2) && (best == 0 || best == grid)) u = lo + (hi - lo) * best / grid;

  auto const fit = fit_at(series, std::exp(u), fixed_scale);
  LogRegretFit out;
  out.a = std::exp(u);
  out.b = fit.b;
  out.scale = fit.scale;
  out.r2 = ss_tot > 0.0 ? 1.0 - fit.sse / ss_tot : 0.0;
  return out;
}

} // namespace oqr
