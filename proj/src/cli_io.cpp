#include "blowup/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace blowup {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

// Reads one JSON object, recording every violation instead of stopping.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  void error(const std::string& key, const std::string& msg) const { errors_.push_back(at(key) + ": " + msg); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_number()) {
      error(key, "must be a number");
      return fallback;
    }
    return obj_[key].get<double>();
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_number_integer()) {
      error(key, "must be an integer");
      return fallback;
    }
    return obj_[key].get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_boolean()) {
      error(key, "must be true or false");
      return fallback;
    }
    return obj_[key].get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_string()) {
      error(key, "must be a string");
      return fallback;
    }
    return obj_[key].get<std::string>();
  }

  // A real number or a [re, im] pair.
  Complex complex(const std::string& key, Complex fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_[key];
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    error(key, "must be a number or a [re, im] pair");
    return fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    seen_.insert(key);
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = obj_[key];
    if (!v.is_array()) {
      error(key, "must be an array of numbers");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_number()) {
        error(key, "must be an array of numbers");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  // Sub-object reader; a missing key yields an empty object.
  Reader child(const std::string& key) {
    seen_.insert(key);
    if (has(key) && !obj_[key].is_object()) {
      error(key, "must be an object");
      return Reader(empty(), at(key), errors_);
    }
    return Reader(has(key) ? obj_[key] : empty(), at(key), errors_);
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) errors_.push_back(at(it.key()) + ": unknown key");
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

// Runs a validate() member and records its message under `path`.
template <typename T>
void check(const T& value, const std::string& path, std::vector<std::string>& errors) {
  try {
    value.validate();
  } catch (const std::exception& e) {
    errors.push_back(path + ": " + e.what());
  }
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

RunConfig parse_config_json(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError({"/: configuration must be a JSON object"});
  RunConfig c;
  Reader root(j, "", errors);
  c.problem_id = root.string("problem_id", c.problem_id);
  c.out_dir = root.string("out_dir", c.out_dir);
  {
    const double seed = root.number("seed", static_cast<double>(c.seed));
    if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9.007199254740992e15)
      root.error("seed", "must be a nonnegative integer");
    else
      c.seed = static_cast<std::uint64_t>(seed);
  }

  // Coefficients.
  {
    Reader r = root.child("coefficients");
    CoefficientSpec& k = c.problem.coeff;
    k.tau = r.integer("tau", 0);
    k.p = r.number("p", k.p);
    k.lambda = r.complex("lambda", k.lambda);
    const bool singular = r.boolean("singular", false);
    if (k.tau == 0) {
      k.form = DampingForm::Phase;
      k.a_phase = r.number("a_phase", 0.0);
      for (const char* key : {"a0", "alpha", "V0", "singular"})
        if (r.has(key)) r.error(key, "not allowed with tau=0 (coefficient form mismatch)");
      if (!(std::abs(k.a_phase) <= std::numbers::pi / 2 + 1e-15))
        r.error("a_phase", "must lie in [-pi/2, pi/2]");
    } else if (k.tau == 1) {
      if (r.has("a_phase")) r.error("a_phase", "not allowed with tau=1 (coefficient form mismatch)");
      r.number("a_phase", 0.0);
      if (singular) {
        k.form = DampingForm::Singular;
        k.V0 = r.number("V0", 1.0);
        for (const char* key : {"a0", "alpha"})
          if (r.has(key)) r.error(key, "not allowed with singular damping (coefficient form mismatch)");
        r.number("a0", 0.0);
        r.number("alpha", 0.0);
        if (!(k.V0 >= 0.0)) r.error("V0", "must be nonnegative");
      } else {
        k.form = DampingForm::Profile;
        k.a0 = r.number("a0", 1.0);
        k.alpha = r.number("alpha", 0.0);
        if (r.has("V0")) r.error("V0", "only allowed with singular damping");
        r.number("V0", 0.0);
        if (!(k.alpha >= 0.0 && k.alpha <= 1.0)) r.error("alpha", "alpha must lie in [0,1]");
        if (!(k.a0 >= 0.0)) r.error("a0", "must be nonnegative");
      }
    } else {
      r.error("tau", "must be 0 or 1");
    }
    if (!(k.p > 1.0)) r.error("p", "must exceed 1");
    r.reject_unknown();
  }

  // Grid.
  {
    Reader r = root.child("grid");
    GridSpec& g = c.problem.grid;
    const std::string geom = r.string("geometry", "line");
    try {
      g.geometry = geometry_kind_from_string(geom);
    } catch (const std::exception& e) {
      r.error("geometry", e.what());
    }
    g.extent = r.number("extent", g.extent);
    g.h = r.number("h", g.h);
    g.dimension = r.integer("dimension", g.dimension);
    g.omega = r.number("omega", g.omega);
    g.n_theta = r.integer("n_theta", g.n_theta);
    r.reject_unknown();
    check(g, "/grid", errors);
  }
  c.problem.domain = default_domain(c.problem.grid);

  // Initial data.
  {
    Reader r = root.child("initial");
    InitialDataSpec& d = c.problem.initial;
    d.center = r.numbers("center");
    d.width = r.number("width", d.width);
    d.f_amplitude = r.complex("f_amplitude", d.f_amplitude);
    d.g_amplitude = r.complex("g_amplitude", d.g_amplitude);
    d.epsilon = r.number("epsilon", d.epsilon);
    if (c.problem.coeff.tau == 0 && r.has("g_amplitude") && d.g_amplitude != Complex{})
      r.error("g_amplitude", "initial velocity is only meaningful for tau=1");
    r.reject_unknown();
    check(d, "/initial", errors);
  }

  // Controls.
  {
    Reader r = root.child("controls");
    Controls& k = c.controls;
    k.M = r.number("M", k.M);
    k.dt_initial = r.number("dt_initial", k.dt_initial);
    k.dt_max = r.number("dt_max", k.dt_max);
    k.dt_min = r.number("dt_min", k.dt_min);
    k.t_max = r.number("t_max", k.t_max);
    k.max_growth = r.number("max_growth", k.max_growth);
    k.regrow_below = r.number("regrow_below", k.regrow_below);
    k.snapshot_interval = r.number("snapshot_interval", k.snapshot_interval);
    const double steps = r.number("max_steps", static_cast<double>(k.max_steps));
    if (!(steps >= 1.0) || steps != std::floor(steps)) r.error("max_steps", "must be a positive integer");
    else k.max_steps = static_cast<long>(steps);
    r.reject_unknown();
    check(k, "/controls", errors);
  }

  // Sweep.
  {
    Reader r = root.child("sweep");
    SweepSettings& s = c.sweep;
    s.epsilons = r.numbers("epsilons");
    s.auto_extent = r.boolean("auto_extent", s.auto_extent);
    s.max_extent_doublings = r.integer("max_extent_doublings", s.max_extent_doublings);
    s.slope_tolerance = r.number("slope_tolerance", s.slope_tolerance);
    for (double e : s.epsilons)
      if (!(e > 0.0)) {
        r.error("epsilons", "entries must be positive");
        break;
      }
    if (s.max_extent_doublings < 0) r.error("max_extent_doublings", "must be nonnegative");
    if (!(s.slope_tolerance > 0.0)) r.error("slope_tolerance", "must be positive");
    r.reject_unknown();
  }
  root.reject_unknown();

  if (errors.empty()) {
    try {
      c.problem.validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("/: ") + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"/: " + path.string() + " is not valid JSON: " + e.what()});
  }
  return parse_config_json(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["problem_id"] = c.problem_id;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  const CoefficientSpec& k = c.problem.coeff;
  json co{{"tau", k.tau}, {"p", k.p}, {"lambda", complex_json(k.lambda)}};
  switch (k.form) {
    case DampingForm::Phase: co["a_phase"] = k.a_phase; break;
    case DampingForm::Profile: co["a0"] = k.a0; co["alpha"] = k.alpha; break;
    case DampingForm::Singular: co["singular"] = true; co["V0"] = k.V0; break;
  }
  j["coefficients"] = co;
  const GridSpec& g = c.problem.grid;
  j["grid"] = {{"geometry", std::string(to_string(g.geometry))}, {"extent", g.extent}, {"h", g.h},
               {"dimension", g.dimension}, {"omega", g.omega}, {"n_theta", g.n_theta}};
  const InitialDataSpec& d = c.problem.initial;
  j["initial"] = {{"center", d.center}, {"width", d.width}, {"f_amplitude", complex_json(d.f_amplitude)},
                  {"epsilon", d.epsilon}};
  if (k.tau == 1) j["initial"]["g_amplitude"] = complex_json(d.g_amplitude);
  const Controls& m = c.controls;
  j["controls"] = {{"M", m.M},
                   {"dt_initial", m.dt_initial},
                   {"dt_max", m.dt_max},
                   {"dt_min", m.dt_min},
                   {"t_max", m.t_max},
                   {"max_growth", m.max_growth},
                   {"regrow_below", m.regrow_below},
                   {"snapshot_interval", m.snapshot_interval},
                   {"max_steps", m.max_steps}};
  j["sweep"] = {{"epsilons", c.sweep.epsilons},
                {"auto_extent", c.sweep.auto_extent},
                {"max_extent_doublings", c.sweep.max_extent_doublings},
                {"slope_tolerance", c.sweep.slope_tolerance}};
  return j;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string record_csv_header() {
  return "epsilon,p,tau,alpha,zeta,status,T_at_M_1e3,T_at_M_1e4,T_at_M_1e5,T_at_M_1e6,"
         "T_extrapolated,dt_final,h,steps\n";
}

std::string record_csv_row(const BlowupRecord& r) {
  std::string s = format_double(r.epsilon) + ',' + format_double(r.p) + ',' + std::to_string(r.tau) + ',' +
                  format_double(r.alpha) + ',' + format_double(r.zeta) + ',' + std::string(to_string(r.status));
  for (double t : r.T_at_M) s += ',' + format_double(t);
  s += ',' + format_double(r.T_extrapolated) + ',' + format_double(r.dt_final) + ',' + format_double(r.h) + ',' +
       std::to_string(r.steps) + '\n';
  return s;
}

std::string records_csv(const std::vector<BlowupRecord>& rows) {
  std::string s = record_csv_header();
  for (const auto& r : rows) s += record_csv_row(r);
  return s;
}

std::string trace_csv(const FunctionalTrace& tr) {
  std::string s = "R,y,m\n";
  for (std::size_t i = 0; i < tr.size(); ++i)
    s += format_double(tr.radii[i]) + ',' + format_double(tr.y[i]) + ',' + format_double(tr.m[i]) + '\n';
  return s;
}

json sweep_summary(const SweepResult& sr) {
  auto num = [](const FitResult& f, double v) -> json { return f.ok ? json(v) : json(nullptr); };
  return {{"problem_id", sr.problem_id},
          {"slope", num(sr.power, sr.power.slope)},
          {"intercept", num(sr.power, sr.power.intercept)},
          {"r2_power", num(sr.power, sr.power.r2)},
          {"exp_slope", num(sr.exponential, sr.exponential.slope)},
          {"r2_exp", num(sr.exponential, sr.exponential.r2)},
          {"fit_status", sr.power.status},
          {"verdict", sr.verdict},
          {"rows", sr.rows.size()},
          {"blowup_rows", fit_rows(sr).size()}};
}

std::string loglog_dat(const SweepResult& sr) {
  std::string s = "# log_eps log_T\n";
  for (const auto& [eps, T] : fit_rows(sr)) s += format_double(std::log(eps)) + ' ' + format_double(std::log(T)) + '\n';
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace blowup
