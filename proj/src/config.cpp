#include "oqr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "oqr/errors.hpp"

namespace oqr {

using nlohmann::json;

namespace {

/// Reads keys of one JSON object, remembering which ones were consumed so
/// that leftovers can be reported as unknown.
class ObjectReader
{
public:
  ObjectReader(json const &j, std::string path)
    : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  std::string field(std::string const &key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(std::string const &key)
  {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  json const &raw(std::string const &key) { return j_.at(key); }

  double number(std::string const &key, double fallback)
  {
    if (!has(key)) return fallback;
    auto const &v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + " must be a number");
    return v.get<double>();
  }

  std::optional<double> maybe_number(std::string const &key)
  {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::int64_t integer(std::string const &key, std::int64_t fallback)
  {
    if (!has(key)) return fallback;
    auto const &v = j_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      double const x = v.get<double>();
      if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
    }
    throw ConfigError(field(key) + " must be an integer");
  }

  std::optional<std::int64_t> maybe_integer(std::string const &key)
  {
    if (!has(key)) return std::nullopt;
    return integer(key, 0);
  }

  bool boolean(std::string const &key, bool fallback)
  {
    if (!has(key)) return fallback;
    auto const &v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::optional<bool> maybe_boolean(std::string const &key)
  {
    if (!has(key)) return std::nullopt;
    return boolean(key, false);
  }

  std::string string(std::string const &key, std::string const &fallback)
  {
    if (!has(key)) return fallback;
    auto const &v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + " must be a string");
    return v.get<std::string>();
  }

  void finish() const
  {
    for (auto const &[key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + field(key));
    }
  }

private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  json const &j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(json const &v, std::string const &field)
{
  if (!v.is_array()) throw ConfigError(field + " must be an array of numbers");
  std::vector<double> out;
  for (auto const &e : v) {
    if (!e.is_number()) throw ConfigError(field + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

SwitchPolicy::Kind switch_kind_from_string(std::string const &s, std::string const &field)
{
  if (s == "oracle_radius") return SwitchPolicy::Kind::OracleRadius;
  if (s == "fixed_iteration") return SwitchPolicy::Kind::FixedIteration;
  if (s == "plateau") return SwitchPolicy::Kind::PlateauDetect;
  throw ConfigError(field + ": unknown switch kind '" + s + "'");
}

NoiseConfig parse_noise(json const &j)
{
  ObjectReader r(j, "noise");
  NoiseConfig n;
  n.family = r.string("family", n.family);
  n.sigma = r.number("sigma", n.sigma);
  n.nu = r.number("nu", n.nu);
  n.scale = r.number("scale", n.scale);
  r.finish();
  if (n.family != "gaussian" && n.family != "student_t") {
    throw ConfigError("noise.family must be 'gaussian' or 'student_t'");
  }
  if (!(n.sigma > 0.0)) throw ConfigError("noise.sigma must be > 0");
  if (!(n.nu > 1.0)) throw ConfigError("noise.nu must be > 1");
  if (!(n.scale > 0.0)) throw ConfigError("noise.scale must be > 0");
  return n;
}

CovarianceConfig parse_covariance(json const &j)
{
  ObjectReader r(j, "covariance");
  CovarianceConfig c;
  std::string const kind = r.string("kind", "identity");
  if (kind == "identity") {
    c.kind = CovarianceKind::Identity;
  } else if (kind == "diagonal") {
    c.kind = CovarianceKind::Diagonal;
  } else if (kind == "full") {
    c.kind = CovarianceKind::Full;
  } else {
    throw ConfigError("covariance.kind must be identity, diagonal or full");
  }
  if (r.has("values")) c.values = number_list(r.raw("values"), "covariance.values");
  if (r.has("matrix")) {
    auto const &m = r.raw("matrix");
    if (!m.is_array()) throw ConfigError("covariance.matrix must be an array of rows");
    for (std::size_t i = 0; i < m.size(); ++i) {
      c.matrix.push_back(number_list(m[i], "covariance.matrix[" + std::to_string(i) + "]"));
    }
  }
  r.finish();
  return c;
}

SwitchConfig parse_switch(json const &j)
{
  ObjectReader r(j, "learner.switch");
  SwitchConfig s;
  if (r.has("kind")) s.kind = switch_kind_from_string(r.string("kind", ""), "learner.switch.kind");
  s.radius_factor = r.number("radius_factor", s.radius_factor);
  s.batch_c1 = r.number("batch_c1", s.batch_c1);
  s.t1 = r.integer("t1", s.t1);
  s.t2 = r.maybe_integer("t2");
  s.alpha = r.maybe_number("alpha");
  s.window = r.integer("window", s.window);
  s.rel_improve = r.number("rel_improve", s.rel_improve);
  r.finish();
  return s;
}

LearnerConfig parse_learner(json const &j)
{
  ObjectReader r(j, "learner");
  LearnerConfig l;
  if (r.has("mode")) {
    try {
      l.mode = mode_from_string(r.string("mode", ""));
    } catch (ConfigError const &e) {
      throw ConfigError(std::string("learner.mode: ") + e.what());
    }
  }
  l.eta0 = r.maybe_number("eta0");
  l.eta0_c = r.number("eta0_c", l.eta0_c);
  l.geo_rate = r.maybe_number("geo_rate");
  l.geo_c = r.number("geo_c", l.geo_c);
  l.c5 = r.number("c5", l.c5);
  l.const_eta = r.maybe_number("const_eta");
  l.const_eta_c = r.number("const_eta_c", l.const_eta_c);
  l.constant_only = r.boolean("constant_only", l.constant_only);
  l.ca = r.number("ca", l.ca);
  l.cb = r.number("cb", l.cb);
  l.b0_over_cl = r.number("b0_over_cl", l.b0_over_cl);
  l.offset_scales_with_d = r.maybe_boolean("offset_scales_with_d");
  l.ls_c = r.number("ls_c", l.ls_c);
  l.ls_c2 = r.number("ls_c2", l.ls_c2);
  l.d0 = r.maybe_number("d0");
  if (r.has("switch")) l.sw = parse_switch(r.raw("switch"));
  r.finish();
  return l;
}

json optional_json(auto const &v) { return v ? json(*v) : json(nullptr); }

} // namespace

NoiseFamily NoiseConfig::to_family() const
{
  if (family == "gaussian") return Gaussian{sigma};
  return StudentT{nu, scale};
}

CovariateSpec CovarianceConfig::to_spec(Index dim) const
{
  switch (kind) {
  case CovarianceKind::Identity: return CovariateSpec::identity(dim);
  case CovarianceKind::Diagonal: {
    if (static_cast<Index>(values.size()) != dim) {
      throw ConfigError("covariance.values must have length d = " + std::to_string(dim));
    }
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = values[static_cast<std::size_t>(i)];
    return CovariateSpec::diagonal(v);
  }
  case CovarianceKind::Full: {
    if (static_cast<Index>(matrix.size()) != dim) {
      throw ConfigError("covariance.matrix must have d = " + std::to_string(dim) + " rows");
    }
    Matrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      auto const &row = matrix[static_cast<std::size_t>(i)];
      if (static_cast<Index>(row.size()) != dim) {
        throw ConfigError("covariance.matrix row " + std::to_string(i) + " must have length d");
      }
      for (Index k = 0; k < dim; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
    }
    return CovariateSpec::full(m);
  }
  }
  throw ConfigError("covariance: unhandled kind");
}

void ExperimentConfig::validate() const
{
  if (name.empty()) throw ConfigError("name must be non-empty");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (T < 1) throw ConfigError("T must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (!(snr > 0.0)) throw ConfigError("snr must be > 0");
  if (batch_size.empty()) throw ConfigError("batch_size must be non-empty");
  for (auto n : batch_size) {
    if (n < 1) throw ConfigError("batch_size entries must be >= 1");
  }
  if (initial_batch && *initial_batch < 1) throw ConfigError("initial_batch must be >= 1");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (workers && *workers < 1) throw ConfigError("workers must be >= 1");
  if (output_path.empty()) throw ConfigError("output_path must be non-empty");
  auto const dim = static_cast<std::size_t>(d);
  if (covariance.kind == CovarianceKind::Diagonal && covariance.values.size() != dim) {
    throw ConfigError("covariance.values must have length d = " + std::to_string(d));
  }
  if (covariance.kind == CovarianceKind::Full) {
    bool ok = covariance.matrix.size() == dim;
    for (auto const &row : covariance.matrix) ok = ok && row.size() == dim;
    if (!ok) throw ConfigError("covariance.matrix must be d x d with d = " + std::to_string(d));
  }
  auto const &l = learner;
  auto positive = [](std::optional<double> v) { return !v || *v > 0.0; };
  if (!positive(l.eta0)) throw ConfigError("learner.eta0 must be > 0");
  if (!(l.eta0_c > 0.0)) throw ConfigError("learner.eta0_c must be > 0");
  if (l.geo_rate && !(*l.geo_rate > 0.0 && *l.geo_rate < 1.0)) {
    throw ConfigError("learner.geo_rate must lie in (0, 1)");
  }
  if (!(l.geo_c > 0.0)) throw ConfigError("learner.geo_c must be > 0");
  if (!(l.c5 > 0.0)) throw ConfigError("learner.c5 must be > 0");
  if (!positive(l.const_eta)) throw ConfigError("learner.const_eta must be > 0");
  if (!(l.const_eta_c > 0.0)) throw ConfigError("learner.const_eta_c must be > 0");
  if (!(l.ca > 0.0)) throw ConfigError("learner.ca must be > 0");
  if (!(l.cb > 0.0)) throw ConfigError("learner.cb must be > 0");
  if (!(l.b0_over_cl > 0.0)) throw ConfigError("learner.b0_over_cl must be > 0");
  if (!(l.ls_c > 0.0)) throw ConfigError("learner.ls_c must be > 0");
  if (!(l.ls_c2 > 0.0)) throw ConfigError("learner.ls_c2 must be > 0");
  if (!positive(l.d0)) throw ConfigError("learner.d0 must be > 0");
  auto const &s = l.sw;
  if (!(s.radius_factor > 0.0)) throw ConfigError("learner.switch.radius_factor must be > 0");
  if (!(s.batch_c1 > 0.0)) throw ConfigError("learner.switch.batch_c1 must be > 0");
  if (s.t1 < 0) throw ConfigError("learner.switch.t1 must be >= 0");
  if (s.t2 && *s.t2 < s.t1) throw ConfigError("learner.switch.t2 must be >= learner.switch.t1");
  if (s.alpha && !(*s.alpha > 0.0)) throw ConfigError("learner.switch.alpha must be > 0");
  if (s.window < 1) throw ConfigError("learner.switch.window must be >= 1");
  if (!(s.rel_improve >= 0.0)) throw ConfigError("learner.switch.rel_improve must be >= 0");
}

std::vector<std::int64_t> ExperimentConfig::batch_sizes(std::int64_t steps) const
{
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
  for (std::int64_t s = 0; s < steps; ++s) {
    if (s == 0 && initial_batch) {
      out.push_back(*initial_batch);
    } else {
      out.push_back(batch_size[static_cast<std::size_t>(s) % batch_size.size()]);
    }
  }
  return out;
}

ExperimentConfig parse_config(json const &j)
{
  ObjectReader r(j, "");
  ExperimentConfig c;
  c.name = r.string("name", c.name);
  if (r.has("kind")) c.kind = r.string("kind", "");
  c.d = r.integer("d", c.d);
  c.T = r.integer("T", c.T);
  c.tau = r.number("tau", c.tau);
  if (r.has("noise")) c.noise = parse_noise(r.raw("noise"));
  c.snr = r.number("snr", c.snr);
  std::string const dir = r.string("direction", "random");
  if (dir == "random") {
    c.direction = Direction::RandomUnit;
  } else if (dir == "ones") {
    c.direction = Direction::AllOnes;
  } else {
    throw ConfigError("direction must be 'random' or 'ones'");
  }
  if (r.has("batch_size")) {
    auto const &b = r.raw("batch_size");
    c.batch_size.clear();
    if (b.is_number_integer()) {
      c.batch_size.push_back(b.get<std::int64_t>());
    } else if (b.is_array()) {
      for (auto const &e : b) {
        if (!e.is_number_integer()) throw ConfigError("batch_size must hold integers");
        c.batch_size.push_back(e.get<std::int64_t>());
      }
    } else {
      throw ConfigError("batch_size must be an integer or a list of integers");
    }
  }
  c.initial_batch = r.maybe_integer("initial_batch");
  if (r.has("covariance")) c.covariance = parse_covariance(r.raw("covariance"));
  if (r.has("learner")) c.learner = parse_learner(r.raw("learner"));
  c.replications = r.integer("replications", c.replications);
  if (r.has("base_seed")) {
    auto const &v = r.raw("base_seed");
    if (v.is_number_unsigned()) {
      c.base_seed = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      c.base_seed = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      throw ConfigError("base_seed must be a non-negative integer");
    }
  }
  c.thin = r.integer("thin", c.thin);
  c.output_path = r.string("output_path", c.output_path);
  c.workers = r.maybe_integer("workers");
  r.finish();
  c.validate();
  auto const &l = c.learner;
  if (l.sw.kind != SwitchPolicy::Kind::OracleRadius && !l.d0 && !l.eta0 &&
      l.mode != Mode::LeastSquares) {
    throw ConfigError("learner.d0 (or learner.eta0) is required unless learner.switch.kind is "
                      "oracle_radius");
  }
  return c;
}

std::string to_string(CovarianceKind k)
{
  switch (k) {
  case CovarianceKind::Identity: return "identity";
  case CovarianceKind::Diagonal: return "diagonal";
  case CovarianceKind::Full: return "full";
  }
  return "?";
}

std::string to_string(Direction d) { return d == Direction::AllOnes ? "ones" : "random"; }

json to_json(ExperimentConfig const &c)
{
  json j;
  j["name"] = c.name;
  j["kind"] = optional_json(c.kind);
  j["d"] = c.d;
  j["T"] = c.T;
  j["tau"] = c.tau;
  j["noise"] = {{"family", c.noise.family},
                {"sigma", c.noise.sigma},
                {"nu", c.noise.nu},
                {"scale", c.noise.scale}};
  j["snr"] = c.snr;
  j["direction"] = to_string(c.direction);
  j["batch_size"] = c.batch_size.size() == 1 ? json(c.batch_size.front()) : json(c.batch_size);
  j["initial_batch"] = optional_json(c.initial_batch);
  json cov = {{"kind", to_string(c.covariance.kind)}};
  if (!c.covariance.values.empty()) cov["values"] = c.covariance.values;
  if (!c.covariance.matrix.empty()) cov["matrix"] = c.covariance.matrix;
  j["covariance"] = cov;
  auto const &l = c.learner;
  json sw = {{"kind", to_string(l.sw.kind)},
             {"radius_factor", l.sw.radius_factor},
             {"batch_c1", l.sw.batch_c1},
             {"t1", l.sw.t1},
             {"t2", optional_json(l.sw.t2)},
             {"alpha", optional_json(l.sw.alpha)},
             {"window", l.sw.window},
             {"rel_improve", l.sw.rel_improve}};
  j["learner"] = {{"mode", to_string(l.mode)},
                  {"eta0", optional_json(l.eta0)},
                  {"eta0_c", l.eta0_c},
                  {"geo_rate", optional_json(l.geo_rate)},
                  {"geo_c", l.geo_c},
                  {"c5", l.c5},
                  {"const_eta", optional_json(l.const_eta)},
                  {"const_eta_c", l.const_eta_c},
                  {"constant_only", l.constant_only},
                  {"ca", l.ca},
                  {"cb", l.cb},
                  {"b0_over_cl", l.b0_over_cl},
                  {"offset_scales_with_d", optional_json(l.offset_scales_with_d)},
                  {"ls_c", l.ls_c},
                  {"ls_c2", l.ls_c2},
                  {"d0", optional_json(l.d0)},
                  {"switch", sw}};
  j["replications"] = c.replications;
  j["base_seed"] = c.base_seed;
  j["thin"] = c.thin;
  j["output_path"] = c.output_path;
  j["workers"] = optional_json(c.workers);
  return j;
}

json load_config_json(std::string const &path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (json::parse_error const &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("format") && j["format"] == "oqr-manifest") {
    if (!j.contains("config")) throw ConfigError("manifest '" + path + "' has no config");
    json cfg = j["config"];
    if ((!cfg.contains("kind") || cfg["kind"].is_null()) && j.contains("kind")) {
      cfg["kind"] = j["kind"];
    }
    return cfg;
  }
  return j;
}

ExperimentConfig load_config(std::string const &path) { return parse_config(load_config_json(path)); }

} // namespace oqr
