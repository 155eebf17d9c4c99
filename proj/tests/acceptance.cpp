// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oqr/harness.hpp"

using namespace oqr;

namespace {

struct Outcome
{
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, std::string const &title, std::function<Outcome()> const &fn,
            double budget_s = 0.0)
{
  auto const t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = fn();
  } catch (std::exception const &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double const secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail += " (over time budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %2d: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Desk-scale base for the one-sample criteria.
ExperimentConfig base_online()
{
  ExperimentConfig c;
  c.name = "acceptance";
  c.d = 20;
  c.T = 20000;
  c.tau = 0.5;
  c.snr = 20.0;
  c.replications = 20;
  c.base_seed = 20240611;
  c.learner.mode = Mode::OnlineOneSample;
  c.learner.sw.kind = SwitchPolicy::Kind::OracleRadius;
  c.learner.sw.radius_factor = 1.0;
  return c;
}

VariantResult run_single(ExperimentConfig const &cfg, std::string name = "v")
{
  return replicate(Variant{std::move(name), cfg, false});
}

double median_at(VariantResult const &r, std::int64_t t)
{
  for (auto const &row : r.summary.rows) {
    if (row.t == t) return row.rel_err_median;
  }
  throw std::runtime_error("time point not in summary");
}

double median_t1(VariantResult const &r)
{
  std::vector<double> v;
  for (auto const &rec : r.records) {
    if (rec.t1) v.push_back(static_cast<double>(*rec.t1));
  }
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double final_median_sq(VariantResult const &r, std::int64_t t)
{
  std::vector<double> v;
  for (auto const &rec : r.records) v.push_back(std::pow(rec.rows[static_cast<std::size_t>(t)].rel_err, 2));
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double mean_final_sq_error(VariantResult const &r)
{
  double const norm = r.run.truth.beta_star.norm();
  double s = 0.0;
  for (auto const &rec : r.records) s += std::pow(rec.final_row().rel_err * norm, 2);
  return s / static_cast<double>(r.records.size());
}

Outcome c1()
{
  auto const r = run_single(base_online());
  double const t1 = median_t1(r);
  if (std::isnan(t1)) return {false, "no replication reached phase two"};
  auto const t1i = static_cast<std::int64_t>(t1);
  double const drop = std::log(median_at(r, 0)) - std::log(median_at(r, t1i));
  double const ratio = final_median_sq(r, 20000) / final_median_sq(r, 10000);
  bool const pass = drop >= 2.0 && ratio >= 0.3 && ratio <= 0.8;
  return {pass, fmt("median t1=%.0f, log-error drop before t1=%.3f (>=2), err^2(T)/err^2(T/2)=%.3f "
                    "(in [0.3,0.8])",
                    t1, drop, ratio)};
}

Outcome c2()
{
  auto cfg = base_online();
  cfg.d = 10;
  auto const r10 = run_single(cfg);
  cfg.d = 40;
  auto const r40 = run_single(cfg);
  double const m10 = mean_final_sq_error(r10), m40 = mean_final_sq_error(r40);
  double const ratio = m40 / m10;
  return {ratio >= 2.0 && ratio <= 8.0,
          fmt("MSE(10)=%.4g MSE(40)=%.4g ratio=%.3f (in [2,8])", m10, m40, ratio)};
}

Outcome c3()
{
  auto cfg = base_online();
  cfg.noise.family = "student_t";
  cfg.noise.nu = 1.1;
  cfg.noise.scale = 1.0;
  auto const qr = run_single(cfg, "qr");
  cfg.learner.mode = Mode::LeastSquares;
  auto const ls = run_single(cfg, "ls");
  double const q = qr.summary.rows.back().rel_err_median;
  double const l = ls.summary.rows.back().rel_err_median;
  double const div = ls.summary.divergence_fraction;
  bool const pass = q <= 0.1 && (l >= 10.0 * q || div >= 0.5);
  return {pass, fmt("QR median final rel err=%.3g (<=0.1); LS=%.3g (ratio %.1f, >=10) diverged "
                    "fraction=%.2f",
                    q, l, l / q, div)};
}

Outcome c4()
{
  auto const r = run_single(base_online());
  auto const fit = regret_fit(r);
  auto regret_at = [&](std::int64_t t) {
    return r.summary.rows[static_cast<std::size_t>(t)].regret_mean;
  };
  std::int64_t const T = 20000, t0 = T / 4;
  double const ratio = (regret_at(4 * t0) - regret_at(2 * t0)) / (regret_at(2 * t0) - regret_at(t0));
  bool const pass = fit.r2 >= 0.9 && ratio >= 0.6 && ratio <= 1.5;
  return {pass, fmt("fit b=%.3g a=%.3g scale=%.3g r2=%.4f (>=0.9); dyadic increment ratio=%.3f "
                    "(in [0.6,1.5])",
                    fit.b, fit.a, fit.scale, fit.r2, ratio)};
}

Outcome c5()
{
  auto cfg = base_online();
  // beta_0 = 0 with SNR 0.2 puts the start at ||beta0 - beta*|| = 0.2 gamma.
  cfg.snr = 0.2;
  cfg.noise.family = "student_t";
  cfg.noise.nu = 1.1;
  cfg.learner.cb = 1.0;
  cfg.learner.sw.kind = SwitchPolicy::Kind::FixedIteration;
  cfg.learner.sw.t1 = 0;
  cfg.learner.d0 = cfg.snr;
  cfg.learner.ca = 1.0;
  auto const small = run_single(cfg, "ca_small");
  cfg.learner.ca = 20.0;
  auto const large = run_single(cfg, "ca_large");
  double const s200 = median_at(small, 200), l200 = median_at(large, 200);
  double const sT = median_at(small, cfg.T), lT = median_at(large, cfg.T);
  bool const pass = s200 < l200 && sT > lT;
  return {pass, fmt("t=200: Ca=1 %.3g vs Ca=20 %.3g; t=T: Ca=1 %.3g vs Ca=20 %.3g", s200, l200, sT,
                    lT)};
}

Outcome c6()
{
  auto cfg = base_online();
  auto const one = run_single(cfg, "online");
  cfg.learner.mode = Mode::Batch;
  cfg.batch_size = {100};
  cfg.T = 20000 / 100;
  auto const batch = run_single(cfg, "batch");
  auto normalized = [](VariantResult const &r) {
    auto const &last = r.summary.rows.back();
    return last.regret_mean / last.samples_mean;
  };
  double const o = normalized(one), b = normalized(batch);
  return {b < o, fmt("sample-normalized regret: batch=%.4g one-sample=%.4g", b, o)};
}

Outcome c7()
{
  RngStream rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    Index const d = 1 + static_cast<Index>(rng.next_u64() % 10);
    Index const n = 1 + static_cast<Index>(rng.next_u64() % 20);
    double const tau = 0.02 + 0.96 * rng.uniform01();
    QuantileLevel q(tau);
    BatchData::RowMatrix x(n, d);
    Vector y(n), beta(d), beta2(d);
    for (Index r = 0; r < n; ++r) {
      for (Index k = 0; k < d; ++k) x(r, k) = rng.standard_normal();
      y(r) = 2.0 * rng.standard_normal();
    }
    for (Index k = 0; k < d; ++k) {
      beta(k) = rng.standard_normal();
      beta2(k) = 3.0 * rng.standard_normal();
    }
    BatchData batch(x, y);
    double const gap = empirical_loss(q, batch, beta2) - empirical_loss(q, batch, beta) -
                       subgrad_mean(q, batch, beta).dot(beta2 - beta);
    worst = std::min(worst, gap);
  }
  return {worst >= -1e-12, fmt("min gap over 1e5 instances = %.3g (>= -1e-12)", worst)};
}

Outcome c8()
{
  Index const d = 8;
  Vector ev(d);
  RngStream rng(8);
  for (Index i = 0; i < d; ++i) ev(i) = 0.5 + 1.5 * rng.uniform01();
  ev(0) = 0.5;
  ev(1) = 2.0;
  auto const cov = CovariateSpec::diagonal(ev);
  QuantileLevel const q(0.5);
  int bad = 0;
  double worst = -INFINITY;
  for (int b = 0; b < 20; ++b) {
    Vector beta(d);
    for (Index i = 0; i < d; ++i) beta(i) = rng.standard_normal() * (1.0 + b % 3);
    std::int64_t const n = 100000;
    double s = 0.0, s2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double const v = check_loss(q, sample_covariate(cov, rng).dot(beta));
      s += v;
      s2 += v * v;
    }
    double const m = s / n;
    double const se = std::sqrt(std::max(0.0, s2 / n - m * m) / n);
    double const lo = std::sqrt(cov.c_l / (2 * std::numbers::pi)) * beta.norm() - 3 * se;
    double const hi = std::sqrt(cov.c_u / (2 * std::numbers::pi)) * beta.norm() + 3 * se;
    if (m < lo || m > hi) ++bad;
    worst = std::max(worst, std::max(lo - m, m - hi));
  }
  return {bad == 0, fmt("%d of 20 estimates outside the band (closest approach to an edge %.3g)", bad, worst)};
}

Outcome c9()
{
  QuantileLevel const q(0.5);
  RngStream rng(9);
  int bad = 0;
  std::string worst;
  double worst_z = 0.0;
  for (double delta : {0.1, 1.0, 3.0, 10.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      Index const d = 5;
      auto const cov = CovariateSpec::identity(d);
      auto const noise = make_noise(Gaussian{sigma}, q);
      GroundTruth truth{Vector::Zero(d), 0.0};
      Vector beta = Vector::Zero(d);
      beta(0) = delta;
      auto const mc = mc_excess_risk(q, beta, truth, cov, noise, 200000, rng);
      double const closed = gaussian_excess_risk_closed_form(delta, sigma);
      double const z = std::abs(2.0 * mc.estimate - closed) / (2.0 * mc.std_error);
      if (z > 3.0) ++bad;
      if (z > worst_z) {
        worst_z = z;
        worst = fmt("delta=%g sigma=%g", delta, sigma);
      }
    }
  }
  return {bad == 0, fmt("%d of 12 grid points outside 3 s.e.; largest |z|=%.2f at %s", bad,
                        worst_z, worst.c_str())};
}

Outcome c10()
{
  RngStream rng(10);
  int bad = 0;
  double worst_z = 0.0;
  std::vector<NoiseFamily> families{Gaussian{1.0}, StudentT{1.1, 1.0}, StudentT{3.0, 1.0}};
  for (auto const &fam : families) {
    for (double tau : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      auto const noise = make_noise(fam, QuantileLevel(tau));
      std::int64_t const n = 100000;
      std::int64_t below = 0;
      for (std::int64_t i = 0; i < n; ++i) below += sample_noise(noise, rng) < 0.0 ? 1 : 0;
      double const p = static_cast<double>(below) / n;
      double const z = std::abs(p - tau) / std::sqrt(tau * (1 - tau) / n);
      worst_z = std::max(worst_z, z);
      if (z > 3.0) ++bad;
    }
  }
  return {bad == 0, fmt("%d of 15 cells outside 3 binomial s.e.; largest |z|=%.2f", bad, worst_z)};
}

std::string slurp(std::filesystem::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome c11()
{
  namespace fs = std::filesystem;
  auto cfg = base_online();
  cfg.name = "determinism";
  cfg.T = 2000;
  cfg.replications = 4;
  cfg.thin = 10;
  cfg.output_path = (fs::temp_directory_path() / "oqr_acceptance_determinism").string();
  fs::remove_all(cfg.output_path);
  auto const first = run_experiment(cfg, ExperimentKind::StepsizeComparison);
  std::vector<std::string> bytes;
  for (auto const &f : first.files) bytes.push_back(slurp(f));
  auto const second = run_experiment(cfg, ExperimentKind::StepsizeComparison);
  std::size_t same = 0;
  for (std::size_t i = 0; i < second.files.size(); ++i) {
    if (i < bytes.size() && !bytes[i].empty() && slurp(second.files[i]) == bytes[i]) ++same;
  }
  fs::remove_all(cfg.output_path);
  bool const pass = same == first.files.size() && first.files.size() == 4;
  return {pass, fmt("%zu of %zu files byte-identical across two runs", same, first.files.size())};
}

Outcome c12()
{
  ExperimentConfig cfg;
  cfg.name = "storage";
  cfg.d = 10;
  cfg.T = 200;
  cfg.snr = 20.0;
  cfg.replications = 20;
  cfg.base_seed = 20240612;
  cfg.initial_batch = 5 * cfg.d;
  cfg.batch_size = {cfg.d};
  cfg.learner.sw.radius_factor = 1.0;
  cfg.learner.mode = Mode::InfiniteStorage;
  auto const inf = run_single(cfg, "infinite");
  cfg.learner.mode = Mode::Batch;
  auto const batch = run_single(cfg, "batch");
  double const mi = mean_final_sq_error(inf), mb = mean_final_sq_error(batch);
  return {mi <= mb, fmt("final MSE: infinite-storage=%.4g batch=%.4g", mi, mb)};
}

} // namespace

int main()
{
  report(1, "two-phase dynamics", c1, 30.0);
  report(2, "rate scaling in d", c2, 60.0);
  report(3, "heavy-tail robustness", c3, 60.0);
  report(4, "regret log-growth", c4, 60.0);
  report(5, "short/long-term trade-off", c5);
  report(6, "batch regret below one-sample", c6);
  report(7, "sub-gradient inequality", c7, 10.0);
  report(8, "expectation band", c8);
  report(9, "excess-risk closed form", c9);
  report(10, "quantile-shift correctness", c10);
  report(11, "determinism", c11);
  report(12, "infinite-storage variance reduction", c12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
