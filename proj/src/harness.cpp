#include "oqr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "oqr/errors.hpp"

namespace oqr {

using nlohmann::json;

char const *const version_string = "0.1.0";

std::string to_string(ExperimentKind k)
{
  switch (k) {
  case ExperimentKind::StepsizeComparison: return "stepsize_comparison";
  case ExperimentKind::AccuracyComparison: return "accuracy_comparison";
  case ExperimentKind::ConvergenceDynamics: return "convergence_dynamics";
  case ExperimentKind::ParameterSensitivity: return "parameter_sensitivity";
  case ExperimentKind::RegretDynamics: return "regret_dynamics";
  case ExperimentKind::TradeOff: return "trade_off";
  case ExperimentKind::Single: return "single";
  }
  return "?";
}

ExperimentKind kind_from_string(std::string const &s)
{
  for (auto k : {ExperimentKind::StepsizeComparison, ExperimentKind::AccuracyComparison,
                 ExperimentKind::ConvergenceDynamics, ExperimentKind::ParameterSensitivity,
                 ExperimentKind::RegretDynamics, ExperimentKind::TradeOff,
                 ExperimentKind::Single}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

std::string format_number(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

Variant with(ExperimentConfig const &base, std::string name, auto &&patch)
{
  Variant v{std::move(name), base, false};
  patch(v.cfg.learner);
  return v;
}

} // namespace

std::vector<Variant> make_variants(ExperimentConfig const &cfg, ExperimentKind kind)
{
  std::vector<Variant> out;
  auto const nop = [](LearnerConfig &) {};
  switch (kind) {
  case ExperimentKind::Single: out.push_back({to_string(cfg.learner.mode), cfg, false}); break;

  case ExperimentKind::StepsizeComparison:
    out.push_back(with(cfg, "statistical", nop));
    out.push_back(with(cfg, "constant", [](LearnerConfig &l) { l.constant_only = true; }));
    out.push_back(with(cfg, "inverse_time", [](LearnerConfig &l) {
      l.sw.kind = SwitchPolicy::Kind::FixedIteration;
      l.sw.t1 = 0;
      l.sw.t2.reset();
      l.sw.alpha.reset();
    }));
    break;

  case ExperimentKind::AccuracyComparison: {
    // T is the total sample budget here.
    Variant online{"online", cfg, false};
    online.cfg.learner.mode = Mode::OnlineOneSample;
    online.cfg.batch_size = {1};
    online.cfg.initial_batch.reset();
    out.push_back(online);

    std::int64_t const n = cfg.nominal_batch() > 1 ? cfg.nominal_batch() : 100;
    Variant batch{"batch", cfg, false};
    batch.cfg.learner.mode = Mode::Batch;
    batch.cfg.batch_size = {n};
    batch.cfg.initial_batch.reset();
    batch.cfg.T = std::max<std::int64_t>(1, cfg.T / n);
    out.push_back(batch);

    Variant offline{"offline", online.cfg, true};
    out.push_back(offline);
    break;
  }

  case ExperimentKind::ConvergenceDynamics:
    for (std::string const family : {"gaussian", "student_t"}) {
      for (Mode mode : {Mode::OnlineOneSample, Mode::LeastSquares}) {
        Variant v{std::string(mode == Mode::LeastSquares ? "ls_" : "qr_") + family, cfg, false};
        v.cfg.noise = NoiseConfig{};
        v.cfg.noise.family = family;
        v.cfg.noise.sigma = 1.0;
        v.cfg.noise.nu = 1.1;
        v.cfg.learner.mode = mode;
        out.push_back(v);
      }
    }
    break;

  case ExperimentKind::ParameterSensitivity: {
    double const d = static_cast<double>(cfg.d);
    for (double c : {0.5, 0.2, 0.1, 0.05}) {
      out.push_back(with(cfg, "decay_c" + format_number(c), [&](LearnerConfig &l) {
        l.geo_rate = 1.0 - c / d;
        l.ca = 15.0;
        l.cb = 20.0;
      }));
    }
    for (double cb : {1.0, 5.0, 20.0, 100.0}) {
      out.push_back(with(cfg, "cb" + format_number(cb), [&](LearnerConfig &l) {
        l.ca = 15.0;
        l.cb = cb;
      }));
    }
    for (double ca : {1.0, 5.0, 15.0, 30.0}) {
      out.push_back(with(cfg, "ca" + format_number(ca), [&](LearnerConfig &l) {
        l.ca = ca;
        l.cb = 100.0;
      }));
    }
    out.push_back(with(cfg, "ca1_cb_min", [&](LearnerConfig &l) {
      l.ca = 1.0;
      l.cb = 1.0 / d;
    }));
    break;
  }

  case ExperimentKind::RegretDynamics:
    out.push_back(with(cfg, "statistical", nop));
    out.push_back(with(cfg, "ca10", [](LearnerConfig &l) { l.ca = 10.0; }));
    out.push_back(with(cfg, "ca40", [](LearnerConfig &l) { l.ca = 40.0; }));
    break;

  case ExperimentKind::TradeOff:
    out.push_back(with(cfg, "ca_small", [](LearnerConfig &l) { l.ca = 1.0; }));
    out.push_back(with(cfg, "ca_large", [](LearnerConfig &l) { l.ca = 20.0; }));
    break;
  }
  return out;
}

ResolvedRun resolve(ExperimentConfig const &cfg)
{
  cfg.validate();
  ResolvedRun r;
  auto const &l = cfg.learner;
  r.cov = cfg.covariance.to_spec(cfg.d);
  r.q = QuantileLevel(cfg.tau);
  r.noise = make_noise(cfg.noise.to_family(), r.q);
  r.scale = scale_constants(r.noise, r.cov);
  RngStream truth_rng(cfg.base_seed);
  r.truth = make_truth(r.cov, cfg.snr, cfg.direction, r.scale.gamma, truth_rng);

  bool const oracle = l.sw.kind == SwitchPolicy::Kind::OracleRadius;
  // beta_0 = 0, so ||beta_0 - beta*|| = ||beta*||.
  r.d0 = (oracle || !l.d0) ? r.truth.beta_star.norm() : *l.d0;

  double const c_l = r.cov.c_l, c_u = r.cov.c_u;
  double const tau_bar = r.q.tau_bar();
  double const d = static_cast<double>(cfg.d);
  double const b0_sched = l.b0_over_cl * c_l;
  bool const one_sample = l.mode == Mode::OnlineOneSample || l.mode == Mode::LeastSquares;

  auto &s = r.schedule;
  s.mode = l.mode;
  s.d = cfg.d;
  s.c_l = c_l;
  s.c_u = c_u;
  s.d0 = r.d0;
  if (one_sample) {
    s.eta0 = l.eta0.value_or(theory_eta0_online(l.eta0_c, c_l, c_u, tau_bar, r.d0, d));
    s.geo_rate = l.geo_rate.value_or(theory_geo_rate_online(l.c5, c_l, c_u, tau_bar, d));
  } else {
    s.eta0 = l.eta0.value_or(theory_eta0_batch(l.eta0_c, c_l, c_u, r.d0));
    s.geo_rate = l.geo_rate.value_or(theory_geo_rate_batch(l.geo_c, c_l, c_u));
  }
  if (l.const_eta) {
    s.const_eta = *l.const_eta;
  } else if (l.constant_only) {
    s.const_eta = theory_constant_eta(l.const_eta_c, c_l, c_u, b0_sched, r.scale.b1);
  } else {
    s.const_eta = 1.0;
  }
  s.constant_only = l.constant_only;
  s.ca = l.ca;
  s.cb = l.cb;
  s.b0_over_cl = l.b0_over_cl;
  s.offset_scales_with_d = l.offset_scales_with_d.value_or(one_sample);
  s.ls_c = l.ls_c;
  s.ls_c2 = l.ls_c2;
  try {
    s.validate();
  } catch (ConfigError const &e) {
    throw ConfigError(std::string("learner (resolved schedule): ") + e.what());
  }

  switch (l.sw.kind) {
  case SwitchPolicy::Kind::OracleRadius: r.policy = SwitchPolicy::oracle_radius(); break;
  case SwitchPolicy::Kind::FixedIteration:
    r.policy = l.sw.alpha ? SwitchPolicy::fixed_from_theory(*l.sw.alpha, d, r.d0, r.scale.gamma)
                          : SwitchPolicy::fixed_iteration(l.sw.t1, l.sw.t2);
    break;
  case SwitchPolicy::Kind::PlateauDetect:
    r.policy = SwitchPolicy::plateau_detect(l.sw.window, l.sw.rel_improve);
    break;
  }
  r.thresholds = make_thresholds(r.scale.gamma, c_l, c_u, tau_bar, d,
                                 static_cast<double>(cfg.nominal_batch()), b0_sched,
                                 l.sw.radius_factor, l.sw.batch_c1);
  r.sizes = cfg.batch_sizes(cfg.T);
  return r;
}

std::size_t worker_count(ExperimentConfig const &cfg)
{
  if (cfg.workers) return static_cast<std::size_t>(*cfg.workers);
  if (char const *env = std::getenv("OQR_WORKERS"); env && *env) {
    char *end = nullptr;
    long const v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("OQR_WORKERS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

TrajectoryRecord run_offline(ResolvedRun const &run, BatchStream &stream)
{
  BatchData all(run.cov.dim);
  while (!stream.done()) all.append(stream.next());
  Vector const &star = run.truth.beta_star;

  TrajectoryRecord rec;
  TrajectoryRow row;
  row.rel_err = relative_error(Vector::Zero(run.cov.dim), star);
  row.samples = all.size();
  rec.rows.push_back(row);
  OfflineConfig oc;
  auto const fit = fit_offline_qr(run.q, all, oc, [&](std::int64_t k, Vector const &beta) {
    row.t = k;
    row.rel_err = relative_error(beta, star);
    rec.rows.push_back(row);
  });
  // Report the returned (best) iterate at the end, and pad early stops.
  std::int64_t const budget = static_cast<std::int64_t>(
      std::max(200.0, std::ceil(10.0 * run.cov.dim *
                                std::log(std::max<double>(static_cast<double>(all.size()), 2.0)))));
  while (static_cast<std::int64_t>(rec.rows.size()) < budget + 1) {
    row.t += 1;
    rec.rows.push_back(row);
  }
  rec.rows.back().rel_err = relative_error(fit.beta, star);
  return rec;
}

double median_of(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

} // namespace

TrajectoryRecord run_replication(Variant const &variant, ResolvedRun const &run, std::int64_t r)
{
  RngStream rng(variant.cfg.base_seed + static_cast<std::uint64_t>(r));
  BatchStream stream(run.cov, run.truth, run.noise, run.sizes, rng);
  if (variant.offline) return run_offline(run, stream);
  LearnerState state = make_learner(run.schedule, run.policy, run.thresholds,
                                    Vector::Zero(run.cov.dim), run.truth.beta_star);
  return run_trajectory(state, stream, run.q);
}

VariantResult replicate(Variant const &variant)
{
  VariantResult res;
  res.name = variant.name;
  res.run = resolve(variant.cfg);
  auto const reps = static_cast<std::size_t>(variant.cfg.replications);
  res.records.resize(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t const i = next.fetch_add(1);
      if (i >= reps) return;
      try {
        res.records[i] = run_replication(variant, res.run, static_cast<std::int64_t>(i) + 1);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t const workers = std::min(worker_count(variant.cfg), reps);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }
  for (auto const &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  res.summary = summarize_ensemble(res.records, variant.cfg.thin);
  return res;
}

LogRegretFit regret_fit(VariantResult const &res, std::optional<double> fixed_scale)
{
  std::vector<double> t1s;
  for (auto const &rec : res.records) {
    if (rec.t1) t1s.push_back(static_cast<double>(*rec.t1));
  }
  double const start = std::max(1.0, t1s.empty() ? 1.0 : median_of(t1s));
  std::vector<std::pair<double, double>> series;
  for (auto const &row : res.summary.rows) {
    if (static_cast<double>(row.t) >= start) series.emplace_back(row.t, row.regret_mean);
  }
  return fit_log_regret(series, fixed_scale);
}

void emit_csv(EnsembleSummary const &summary, std::string const &path)
{
  std::FILE *f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  std::fputs("t,rel_err_mean,rel_err_median,rel_err_q25,rel_err_q75,eta,phase,regret_mean,"
             "diverged_frac\n",
             f);
  for (auto const &r : summary.rows) {
    std::fprintf(f, "%lld,%.11e,%.11e,%.11e,%.11e,%.11e,%d,%.11e,%.11e\n",
                 static_cast<long long>(r.t), r.rel_err_mean, r.rel_err_median, r.rel_err_q25,
                 r.rel_err_q75, r.eta, static_cast<int>(r.phase), r.regret_mean,
                 r.diverged_frac);
  }
  bool const ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw std::runtime_error("error while writing '" + path + "'");
}

namespace {

json schedule_json(ScheduleConfig const &s)
{
  return {{"mode", to_string(s.mode)},
          {"eta0", s.eta0},
          {"geo_rate", s.geo_rate},
          {"const_eta", s.const_eta},
          {"constant_only", s.constant_only},
          {"ca", s.ca},
          {"cb", s.cb},
          {"b0_over_cl", s.b0_over_cl},
          {"d", s.d},
          {"offset_scales_with_d", s.offset_scales_with_d},
          {"c_l", s.c_l},
          {"c_u", s.c_u},
          {"d0", s.d0},
          {"ls_c", s.ls_c},
          {"ls_c2", s.ls_c2}};
}

json policy_json(SwitchPolicy const &p)
{
  json j = {{"kind", to_string(p.kind)}};
  if (p.kind == SwitchPolicy::Kind::FixedIteration) {
    j["t1"] = p.t1;
    j["t2"] = p.t2 ? json(*p.t2) : json(nullptr);
  }
  if (p.kind == SwitchPolicy::Kind::PlateauDetect) {
    j["window"] = p.window;
    j["rel_improve"] = p.rel_improve;
  }
  return j;
}

json optional_median(std::vector<TrajectoryRecord> const &records, bool second)
{
  std::vector<double> v;
  for (auto const &rec : records) {
    auto const &t = second ? rec.t2 : rec.t1;
    if (t) v.push_back(static_cast<double>(*t));
  }
  if (v.empty()) return nullptr;
  return median_of(v);
}

json variant_json(Variant const &v, VariantResult const &res, std::string const &csv,
                  ExperimentKind kind)
{
  auto const &last = res.summary.rows.back();
  json j;
  j["csv"] = csv;
  j["offline"] = v.offline;
  j["config"] = to_json(v.cfg);
  j["schedule"] = schedule_json(res.run.schedule);
  j["switch"] = policy_json(res.run.policy);
  j["thresholds"] = {{"radius", res.run.thresholds.radius},
                     {"batch_boundary", res.run.thresholds.batch_boundary}};
  j["steps"] = static_cast<std::int64_t>(res.run.sizes.size());
  j["final"] = {{"t", last.t},
                {"rel_err_mean", last.rel_err_mean},
                {"rel_err_median", last.rel_err_median},
                {"rel_err_q25", last.rel_err_q25},
                {"rel_err_q75", last.rel_err_q75},
                {"regret_mean", last.regret_mean},
                {"samples_mean", last.samples_mean},
                {"sample_normalized_regret",
                 last.samples_mean > 0.0 ? last.regret_mean / last.samples_mean : 0.0},
                {"diverged_frac", res.summary.divergence_fraction}};
  j["t1_median"] = optional_median(res.records, false);
  j["t2_median"] = optional_median(res.records, true);
  if (kind == ExperimentKind::RegretDynamics) {
    try {
      auto const fit = regret_fit(res);
      j["regret_fit"] = {{"a", fit.a}, {"b", fit.b}, {"scale", fit.scale}, {"r2", fit.r2}};
    } catch (ConfigError const &) {
      j["regret_fit"] = nullptr;
    }
  }
  return j;
}

} // namespace

ExperimentOutput run_experiment(ExperimentConfig const &cfg, ExperimentKind kind)
{
  cfg.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_path, ec);
  if (ec) throw std::runtime_error("cannot create '" + cfg.output_path + "': " + ec.message());

  auto const base = resolve(cfg);
  double const gamma = base.scale.gamma;
  ExperimentOutput out;
  json manifest;
  manifest["format"] = "oqr-manifest";
  manifest["version"] = version_string;
  manifest["kind"] = to_string(kind);
  manifest["config"] = to_json(cfg);
  manifest["derived"] = {
      {"gamma", gamma},
      {"b0", base.scale.b0},
      {"b1", base.scale.b1},
      {"c_l", base.cov.c_l},
      {"c_u", base.cov.c_u},
      {"tau_bar", base.q.tau_bar()},
      {"noise_shift", base.noise.shift},
      {"beta_star_norm", base.truth.beta_star.norm()},
      {"d0", base.d0},
      {"theory_radius", 8.0 * gamma / std::sqrt(base.cov.c_l)},
      {"thresholds",
       {{"radius", base.thresholds.radius}, {"batch_boundary", base.thresholds.batch_boundary}}}};

  json variants = json::object();
  json files = json::array();
  for (auto const &v : make_variants(cfg, kind)) {
    auto res = replicate(v);
    std::string const csv = cfg.name + "_" + v.name + ".csv";
    emit_csv(res.summary, (fs::path(cfg.output_path) / csv).string());
    out.files.push_back((fs::path(cfg.output_path) / csv).string());
    files.push_back(csv);
    variants[v.name] = variant_json(v, res, csv, kind);
    out.results.push_back(std::move(res));
  }
  std::string const mname = cfg.name + "_manifest.json";
  files.push_back(mname);
  manifest["variants"] = variants;
  manifest["outputs"] = files;

  auto const mpath = (fs::path(cfg.output_path) / mname).string();
  std::FILE *f = std::fopen(mpath.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write '" + mpath + "'");
  std::string const text = manifest.dump(2) + "\n";
  bool const ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw std::runtime_error("error while writing '" + mpath + "'");
  out.files.push_back(mpath);
  out.manifest = std::move(manifest);
  return out;
}

void set_json_path(json &j, std::string const &path, std::string const &value)
{
  if (path.empty()) throw ConfigError("sweep: empty parameter path");
  json *node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("sweep: malformed parameter path '" + path + "'");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("sweep: '" + path + "' does not name an object");
    if (!node->contains(parts[i]) || (*node)[parts[i]].is_null()) {
      (*node)[parts[i]] = json::object();
    }
    node = &(*node)[parts[i]];
  }
  if (!node->is_object()) throw ConfigError("sweep: '" + path + "' does not name an object");
  json parsed = json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
}

std::vector<std::string> sweep(json const &base, std::string const &param,
                               std::vector<std::string> const &values)
{
  if (values.empty()) throw ConfigError("sweep: no values given");
  std::string const leaf = param.substr(param.rfind('.') == std::string::npos
                                            ? 0
                                            : param.rfind('.') + 1);
  std::string const name = base.contains("name") && base["name"].is_string()
                               ? base["name"].get<std::string>()
                               : ExperimentConfig{}.name;
  std::vector<std::string> files;
  for (auto const &value : values) {
    json j = base;
    set_json_path(j, param, value);
    std::string tag;
    for (char c : value) tag += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-'
                                    ? c
                                    : '_';
    j["name"] = name + "_" + leaf + "-" + tag;
    auto const cfg = parse_config(j);
    auto const out = run_experiment(cfg, ExperimentKind::Single);
    files.insert(files.end(), out.files.begin(), out.files.end());
  }
  return files;
}

namespace {

std::vector<std::string> split_list(std::string const &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json oracle_json(ExperimentConfig const &cfg)
{
  auto const run = resolve(cfg);
  double const gamma = run.scale.gamma;
  double const c_l = run.cov.c_l, c_u = run.cov.c_u;
  auto const analytic = make_thresholds(gamma, c_l, c_u, run.q.tau_bar(),
                                        static_cast<double>(cfg.d),
                                        static_cast<double>(cfg.nominal_batch()), run.scale.b0,
                                        8.0, cfg.learner.sw.batch_c1);
  return {{"gamma", gamma},
          {"b0", run.scale.b0},
          {"b1", run.scale.b1},
          {"c_l", c_l},
          {"c_u", c_u},
          {"tau", run.q.tau()},
          {"tau_bar", run.q.tau_bar()},
          {"radius", analytic.radius},
          {"batch_boundary", analytic.batch_boundary},
          {"configured",
           {{"radius", run.thresholds.radius},
            {"batch_boundary", run.thresholds.batch_boundary},
            {"schedule", schedule_json(run.schedule)}}}};
}

} // namespace

int cli_main(int argc, char const *const *argv)
{
  CLI::App app{"Online quantile regression experiments"};
  app.name("oqr");
  app.require_subcommand(1);

  std::string config_path, kind_name, output, param, values;
  auto *run = app.add_subcommand("run", "Run an experiment and write CSV files plus a manifest");
  run->add_option("--config", config_path, "Config or manifest JSON")->required();
  run->add_option("--kind", kind_name, "Experiment kind (default: config kind, else single)");
  run->add_option("--output", output, "Output directory (overrides output_path)");

  auto *oracle = app.add_subcommand("oracle", "Print scale constants and phase thresholds");
  oracle->add_option("--config", config_path, "Config JSON")->required();

  auto *sw = app.add_subcommand("sweep", "Run the configured learner once per parameter value");
  sw->add_option("--config", config_path, "Config JSON")->required();
  sw->add_option("--param", param, "Dot path of the parameter, e.g. learner.ca")->required();
  sw->add_option("--values", values, "Comma separated values")->required();
  sw->add_option("--output", output, "Output directory (overrides output_path)");

  auto *ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &) {
    std::cout << app.help();
    return 0;
  } catch (CLI::ParseError const &e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (ver->parsed()) {
      std::cout << "oqr " << version_string << "\n";
      return 0;
    }
    if (oracle->parsed()) {
      std::cout << oracle_json(load_config(config_path)).dump(2) << "\n";
      return 0;
    }
    if (run->parsed()) {
      auto cfg = load_config(config_path);
      if (!output.empty()) cfg.output_path = output;
      auto const kind = kind_from_string(!kind_name.empty() ? kind_name
                                                            : cfg.kind.value_or("single"));
      for (auto const &f : run_experiment(cfg, kind).files) std::cout << f << "\n";
      return 0;
    }
    if (sw->parsed()) {
      json base = load_config_json(config_path);
      if (!output.empty()) base["output_path"] = output;
      for (auto const &f : sweep(base, param, split_list(values))) std::cout << f << "\n";
      return 0;
    }
  } catch (ConfigError const &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

} // namespace oqr
