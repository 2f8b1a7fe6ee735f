#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridwave/hybrid.hpp"

// JSON run configuration. Schema (keys not listed are reported as warnings):
//   scenario              string
//   geometry              {type: kite|circle|disc|sphere|free-space, radius, center, dim}
//   incidence             object or array of {kind, amplitude, omega0, sigma, delay, direction, samples}
//   wave_speed            c (default 1)
//   frequency             {W, delta_omega, omega_c (default W/16)}
//   window                {H (default 10), T_end (default last time), time_offset}
//   time                  {t_start, dt, count}
//   observation           {points: [[x, y(, z)]...], grid: {nx, ny, x: [a, b], y: [c, d], z}}
//   solver                {n_gamma, mode: lu|gmres, tolerance, max_iterations, restart,
//                          oversample (default 4), fcc: {count, points, q}, singular: auto|always|never}
//   tracking              {enabled, relative_tol, absolute_tol}
//   reference             {enabled, W_ref (0: automatic), ratio}
//   convergence           {delta_omegas: [...], reference_delta_omega}
//   output                {dir, snapshot_times: [...]}
namespace hybridwave::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeometrySpec {
  std::string type = "kite";
  double radius = 1.0;
  Vec3 center{0.0, 0.0, 0.0};
  int dim = 2;
};

struct ObservationGrid {
  std::size_t nx = 0, ny = 0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0, z = 0.0;

  bool empty() const { return nx == 0 || ny == 0; }
  Vec3 point(std::size_t ix, std::size_t iy) const {
    const double x = nx > 1 ? x0 + (x1 - x0) * double(ix) / double(nx - 1) : x0;
    const double y = ny > 1 ? y0 + (y1 - y0) * double(iy) / double(ny - 1) : y0;
    return {x, y, z};
  }
};

struct SolverSpec {
  int n_gamma = 256;
  std::string mode = "lu";
  double tolerance = 1e-8;
  int max_iterations = 500;
  int restart = 100;
  double oversample = 4.0;
  int fcc_count = 4;
  int fcc_points = 8;
  double fcc_q = 9.1;
  std::string singular = "auto";
};

struct TrackingSpec {
  bool enabled = false;
  double relative_tol = 1e-6;
  std::optional<double> absolute_tol;
};

struct ReferenceSpec {
  bool enabled = false;
  double W_ref = 0.0;
  double ratio = 32.0;
};

struct ConvergenceSpec {
  std::vector<double> delta_omegas;
  double reference_delta_omega = 0.0;
};

struct OutputSpec {
  std::string dir = "out";
  std::vector<double> snapshot_times;
};

struct RunConfig {
  std::string scenario = "run";
  GeometrySpec geometry;
  std::vector<IncidentSpec> incidence;
  double wave_speed = 1.0;
  double W = 0.0;
  double delta_omega = 0.0;
  double omega_c = 0.0;
  double H = 10.0;
  double T_end = 0.0;
  double time_offset = 0.0;
  TimeGrid times;
  std::vector<Vec3> points;
  ObservationGrid grid;
  SolverSpec solver;
  TrackingSpec tracking;
  ReferenceSpec reference;
  ConvergenceSpec convergence;
  OutputSpec output;
  std::vector<std::string> warnings;
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& warnings)
      : j_(j), path_(std::move(path)), warnings_(warnings) {
    if (!j_.is_object()) fail("expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const auto& k : seen_) known = known || k == it.key();
      if (!known) warnings_.push_back("unknown key '" + name(it.key()) + "' ignored");
    }
  }

  bool has(const std::string& key) {
    seen_.push_back(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& msg, const std::string& key = "") const {
    throw ConfigError((key.empty() ? (path_.empty() ? std::string("config") : path_) : name(key)) + ": " + msg);
  }

  const json& at(const std::string& key) {
    if (!has(key)) fail("missing required field", key);
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", key);
    }
    const json& v = j_.at(key);
    if (!v.is_number()) fail("expected a number", key);
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("must be finite", key);
    return x;
  }

  double positive(const std::string& key, std::optional<double> def = std::nullopt) {
    const double x = number(key, def);
    if (!(x > 0.0)) fail("must be positive", key);
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", key);
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail("expected an integer", key);
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail("expected true or false", key);
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", key);
    }
    const json& v = j_.at(key);
    if (!v.is_string()) fail("expected a string", key);
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) fail("expected an array of numbers", key);
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail("expected an array of numbers", key);
      out.push_back(x.get<double>());
    }
    return out;
  }

  Vec3 vector(const std::string& key, std::optional<Vec3> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", key);
    }
    const auto v = numbers(key);
    if (v.size() < 2 || v.size() > 3) fail("expected 2 or 3 components", key);
    return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
  }

  Reader child(const std::string& key) {
    seen_.push_back(key);
    return Reader(j_.at(key), name(key), warnings_);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& warnings_;
  std::vector<std::string> seen_;
};

inline IncidentSpec read_incident(Reader r, double c) {
  IncidentSpec s;
  try {
    s.kind = incident_kind_from_string(r.string("kind", std::string("gaussian-modulated")));
  } catch (const InvalidArgument& e) {
    r.fail(e.what(), "kind");
  }
  s.amplitude = r.number("amplitude", 1.0);
  s.omega0 = r.number("omega0", 12.0);
  s.sigma = r.number("sigma", 2.0);
  s.delay = r.number("delay", 0.0);
  s.direction = r.vector("direction", Vec3{1.0, 0.0, 0.0});
  s.wave_speed = c;
  if (r.has("samples")) {
    Reader smp = r.child("samples");
    s.samples.t0 = smp.number("t0", 0.0);
    s.samples.dt = smp.positive("dt");
    s.samples.samples = smp.numbers("values");
  }
  try {
    validate(s);
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  return s;
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  detail::Reader root(j, "", cfg.warnings);
  cfg.scenario = root.string("scenario", std::string("run"));
  cfg.wave_speed = root.positive("wave_speed", 1.0);

  {
    detail::Reader g = root.child("geometry");
    cfg.geometry.type = g.string("type");
    const std::string& t = cfg.geometry.type;
    if (t != "kite" && t != "circle" && t != "disc" && t != "sphere" && t != "free-space")
      g.fail("unknown geometry '" + t + "' (kite, circle, disc, sphere, free-space)", "type");
    cfg.geometry.radius = g.positive("radius", 1.0);
    cfg.geometry.center = g.vector("center", Vec3{0.0, 0.0, 0.0});
    const int def_dim = t == "sphere" ? 3 : 2;
    cfg.geometry.dim = static_cast<int>(g.integer("dim", def_dim));
    if (t == "free-space" ? (cfg.geometry.dim != 2 && cfg.geometry.dim != 3) : cfg.geometry.dim != def_dim)
      g.fail("inconsistent with geometry type", "dim");
    if ((t == "disc" || t == "sphere") &&
        (cfg.geometry.center[0] != 0.0 || cfg.geometry.center[1] != 0.0 || cfg.geometry.center[2] != 0.0))
      g.fail("series backends need the scatterer centered at the origin", "center");
  }

  {
    const json& inc = root.at("incidence");
    if (inc.is_array()) {
      if (inc.empty()) root.fail("need at least one incidence", "incidence");
      for (std::size_t i = 0; i < inc.size(); ++i)
        cfg.incidence.push_back(detail::read_incident(
            detail::Reader(inc[i], "incidence[" + std::to_string(i) + "]", cfg.warnings), cfg.wave_speed));
    } else {
      cfg.incidence.push_back(detail::read_incident(detail::Reader(inc, "incidence", cfg.warnings), cfg.wave_speed));
    }
    if (cfg.geometry.dim == 2)
      for (const auto& s : cfg.incidence)
        if (s.direction[2] != 0.0) root.fail("2D geometries need in-plane directions", "incidence");
  }

  {
    detail::Reader f = root.child("frequency");
    cfg.W = f.positive("W");
    cfg.delta_omega = f.positive("delta_omega");
    cfg.omega_c = f.number("omega_c", 0.0);
    if (cfg.omega_c < 0.0 || cfg.omega_c >= cfg.W) f.fail("must lie in [0, W)", "omega_c");
  }

  {
    detail::Reader t = root.child("time");
    cfg.times.t0 = t.number("t_start", 0.0);
    cfg.times.dt = t.positive("dt");
    const long long n = t.integer("count");
    if (n < 1) t.fail("must be at least 1", "count");
    cfg.times.count = static_cast<std::size_t>(n);
  }

  if (root.has("window")) {
    detail::Reader w = root.child("window");
    cfg.H = w.positive("H", 10.0);
    cfg.T_end = w.number("T_end", 0.0);
    cfg.time_offset = w.number("time_offset", 0.0);
  }
  if (cfg.T_end <= 0.0) cfg.T_end = std::max(cfg.times.time(cfg.times.count - 1), cfg.times.dt);

  {
    detail::Reader o = root.child("observation");
    if (o.has("points")) {
      const json& pts = o.raw().at("points");
      if (!pts.is_array()) o.fail("expected an array of points", "points");
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const json& p = pts[i];
        if (!p.is_array() || p.size() < 2 || p.size() > 3)
          o.fail("each point needs 2 or 3 numbers", "points[" + std::to_string(i) + "]");
        Vec3 v{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < p.size(); ++k) {
          if (!p[k].is_number()) o.fail("expected a number", "points[" + std::to_string(i) + "]");
          v[k] = p[k].get<double>();
        }
        cfg.points.push_back(v);
      }
    }
    if (o.has("grid")) {
      detail::Reader g = o.child("grid");
      const long long nx = g.integer("nx"), ny = g.integer("ny");
      if (nx < 1) g.fail("must be at least 1", "nx");
      if (ny < 1) g.fail("must be at least 1", "ny");
      cfg.grid.nx = static_cast<std::size_t>(nx);
      cfg.grid.ny = static_cast<std::size_t>(ny);
      const auto xs = g.numbers("x"), ys = g.numbers("y");
      if (xs.size() != 2) g.fail("expected [min, max]", "x");
      if (ys.size() != 2) g.fail("expected [min, max]", "y");
      cfg.grid.x0 = xs[0];
      cfg.grid.x1 = xs[1];
      cfg.grid.y0 = ys[0];
      cfg.grid.y1 = ys[1];
      cfg.grid.z = g.number("z", 0.0);
    }
    if (cfg.points.empty() && cfg.grid.empty()) o.fail("need points or a grid");
  }

  if (root.has("solver")) {
    detail::Reader s = root.child("solver");
    const long long n = s.integer("n_gamma", cfg.solver.n_gamma);
    if (n < 8 || n % 2) s.fail("must be an even integer >= 8", "n_gamma");
    cfg.solver.n_gamma = static_cast<int>(n);
    cfg.solver.mode = s.string("mode", cfg.solver.mode);
    if (cfg.solver.mode != "lu" && cfg.solver.mode != "gmres") s.fail("expected lu or gmres", "mode");
    cfg.solver.tolerance = s.positive("tolerance", cfg.solver.tolerance);
    cfg.solver.max_iterations = static_cast<int>(s.integer("max_iterations", cfg.solver.max_iterations));
    cfg.solver.restart = static_cast<int>(s.integer("restart", cfg.solver.restart));
    if (cfg.solver.max_iterations < 1) s.fail("must be at least 1", "max_iterations");
    if (cfg.solver.restart < 1) s.fail("must be at least 1", "restart");
    cfg.solver.oversample = s.number("oversample", cfg.solver.oversample);
    if (cfg.solver.oversample < 1.0) s.fail("must be at least 1", "oversample");
    if (s.has("fcc")) {
      detail::Reader f = s.child("fcc");
      cfg.solver.fcc_count = static_cast<int>(f.integer("count", cfg.solver.fcc_count));
      cfg.solver.fcc_points = static_cast<int>(f.integer("points", cfg.solver.fcc_points));
      cfg.solver.fcc_q = f.positive("q", cfg.solver.fcc_q);
      if (cfg.solver.fcc_count < 2) f.fail("must be at least 2", "count");
      if (cfg.solver.fcc_points < 2) f.fail("must be at least 2", "points");
      if (cfg.solver.fcc_q <= cfg.solver.fcc_points + 1.0) f.fail("must exceed points + 1", "q");
    }
    cfg.solver.singular = s.string("singular", cfg.solver.singular);
    if (cfg.solver.singular != "auto" && cfg.solver.singular != "always" && cfg.solver.singular != "never")
      s.fail("expected auto, always or never", "singular");
  }

  if (root.has("tracking")) {
    detail::Reader t = root.child("tracking");
    cfg.tracking.enabled = t.boolean("enabled", false);
    cfg.tracking.relative_tol = t.number("relative_tol", cfg.tracking.relative_tol);
    if (cfg.tracking.relative_tol < 0.0) t.fail("must be nonnegative", "relative_tol");
    if (t.has("absolute_tol")) {
      cfg.tracking.absolute_tol = t.number("absolute_tol");
      if (*cfg.tracking.absolute_tol < 0.0) t.fail("must be nonnegative", "absolute_tol");
    }
  }

  if (root.has("reference")) {
    detail::Reader r = root.child("reference");
    cfg.reference.enabled = r.boolean("enabled", true);
    cfg.reference.W_ref = r.number("W_ref", 0.0);
    if (cfg.reference.W_ref < 0.0) r.fail("must be nonnegative", "W_ref");
    cfg.reference.ratio = r.positive("ratio", cfg.reference.ratio);
  }

  if (root.has("convergence")) {
    detail::Reader c = root.child("convergence");
    cfg.convergence.delta_omegas = c.numbers("delta_omegas");
    for (double d : cfg.convergence.delta_omegas)
      if (!(d > 0.0)) c.fail("entries must be positive", "delta_omegas");
    cfg.convergence.reference_delta_omega = c.positive("reference_delta_omega");
  }

  if (root.has("output")) {
    detail::Reader o = root.child("output");
    cfg.output.dir = o.string("dir", cfg.output.dir);
    cfg.output.snapshot_times = o.numbers("snapshot_times");
  }
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset to line number
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw ConfigError("config: parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return config_from_json(j);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {
inline json vec_json(const Vec3& v, int dim) {
  json a = json::array({v[0], v[1]});
  if (dim == 3) a.push_back(v[2]);
  return a;
}
}  // namespace detail

// Every field written, defaults included.
inline json config_to_json(const RunConfig& c) {
  const int dim = c.geometry.dim;
  json j;
  j["scenario"] = c.scenario;
  j["geometry"] = {{"type", c.geometry.type},
                   {"radius", c.geometry.radius},
                   {"center", detail::vec_json(c.geometry.center, 3)},
                   {"dim", dim}};
  json inc = json::array();
  for (const auto& s : c.incidence) {
    json e = {{"kind", to_string(s.kind)}, {"amplitude", s.amplitude}, {"omega0", s.omega0},
              {"sigma", s.sigma},          {"delay", s.delay},         {"direction", detail::vec_json(s.direction, 3)}};
    if (s.kind == IncidentKind::Custom)
      e["samples"] = {{"t0", s.samples.t0}, {"dt", s.samples.dt}, {"values", s.samples.samples}};
    inc.push_back(e);
  }
  j["incidence"] = inc;
  j["wave_speed"] = c.wave_speed;
  j["frequency"] = {{"W", c.W}, {"delta_omega", c.delta_omega}, {"omega_c", c.omega_c}};
  j["window"] = {{"H", c.H}, {"T_end", c.T_end}, {"time_offset", c.time_offset}};
  j["time"] = {{"t_start", c.times.t0}, {"dt", c.times.dt}, {"count", c.times.count}};
  json obs = json::object();
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(detail::vec_json(p, dim));
  obs["points"] = pts;
  if (!c.grid.empty())
    obs["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"x", {c.grid.x0, c.grid.x1}},
                   {"y", {c.grid.y0, c.grid.y1}}, {"z", c.grid.z}};
  j["observation"] = obs;
  j["solver"] = {{"n_gamma", c.solver.n_gamma},
                 {"mode", c.solver.mode},
                 {"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"restart", c.solver.restart},
                 {"oversample", c.solver.oversample},
                 {"fcc", {{"count", c.solver.fcc_count}, {"points", c.solver.fcc_points}, {"q", c.solver.fcc_q}}},
                 {"singular", c.solver.singular}};
  json tr = {{"enabled", c.tracking.enabled}, {"relative_tol", c.tracking.relative_tol}};
  if (c.tracking.absolute_tol) tr["absolute_tol"] = *c.tracking.absolute_tol;
  j["tracking"] = tr;
  j["reference"] = {{"enabled", c.reference.enabled}, {"W_ref", c.reference.W_ref}, {"ratio", c.reference.ratio}};
  if (!c.convergence.delta_omegas.empty() || c.convergence.reference_delta_omega > 0.0)
    j["convergence"] = {{"delta_omegas", c.convergence.delta_omegas},
                        {"reference_delta_omega", c.convergence.reference_delta_omega}};
  j["output"] = {{"dir", c.output.dir}, {"snapshot_times", c.output.snapshot_times}};
  return j;
}

// Observation points: explicit list followed by the grid in row-major (y outer) order.
inline std::vector<Vec3> observation_points(const RunConfig& c) {
  std::vector<Vec3> out = c.points;
  for (std::size_t iy = 0; iy < c.grid.ny; ++iy)
    for (std::size_t ix = 0; ix < c.grid.nx; ++ix) out.push_back(c.grid.point(ix, iy));
  return out;
}

inline HybridConfig hybrid_config(const RunConfig& c) {
  HybridConfig h;
  h.W = c.W;
  h.delta_omega = c.delta_omega;
  h.omega_c = c.omega_c;
  h.H = c.H;
  h.T_end = c.T_end;
  h.time_offset = c.time_offset;
  h.oversample = c.solver.oversample;
  h.wave_speed = c.wave_speed;
  h.fcc_count = c.solver.fcc_count;
  h.fcc_points = c.solver.fcc_points;
  h.fcc_q = c.solver.fcc_q;
  h.singular = c.solver.singular == "always"  ? SingularPolicy::always
               : c.solver.singular == "never" ? SingularPolicy::never
                                              : SingularPolicy::automatic;
  h.times = c.times;
  h.points = observation_points(c);
  return h;
}

inline FrequencyBackend make_backend(const RunConfig& c) {
  const auto& g = c.geometry;
  SolveOptions opt;
  opt.mode = c.solver.mode == "gmres" ? SolveMode::gmres : SolveMode::lu;
  opt.tolerance = c.solver.tolerance;
  opt.max_iterations = c.solver.max_iterations;
  opt.restart = c.solver.restart;
  if (g.type == "kite") return nystrom_backend(kite_curve(), c.solver.n_gamma, c.wave_speed, opt);
  if (g.type == "circle")
    return nystrom_backend(circle_curve(g.radius, {g.center[0], g.center[1]}), c.solver.n_gamma, c.wave_speed, opt);
  if (g.type == "disc") return mie_disc_backend(g.radius, c.wave_speed);
  if (g.type == "sphere") return mie_sphere_backend(g.radius, c.wave_speed);
  return free_space_backend(g.dim, c.wave_speed);
}

inline std::vector<Source> make_sources(const RunConfig& c) {
  std::vector<Source> out;
  for (const auto& s : c.incidence) out.push_back({make_incident(s)});
  return out;
}

// Exterior test for a point against the configured scatterer; points on the
// boundary count as interior.
inline bool is_exterior(const RunConfig& c, const Vec3& p) {
  const auto& g = c.geometry;
  if (g.type == "free-space") return true;
  if (g.type == "disc") return std::hypot(p[0], p[1]) >= g.radius;
  if (g.type == "sphere") return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) >= g.radius;
  static thread_local std::optional<std::pair<std::string, Curve>> cache;
  const std::string key = g.type + std::to_string(g.radius) + std::to_string(g.center[0]) + std::to_string(g.center[1]) + "/" + std::to_string(c.solver.n_gamma);
  if (!cache || cache->first != key) {
    const TrigCurve shape = g.type == "kite" ? kite_curve() : circle_curve(g.radius, {g.center[0], g.center[1]});
    cache.emplace(key, discretize(shape, c.solver.n_gamma));
  }
  const Curve& curve = cache->second;
  for (const auto& x : curve.x)
    if (std::hypot(p[0] - x[0], p[1] - x[1]) < 1e-8) return false;
  return winding_number(curve, {p[0], p[1]}) < 0.5;
}

}  // namespace hybridwave::cli
