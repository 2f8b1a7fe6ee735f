#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "hybridwave/hybrid.hpp"
#include "hybridwave/quadrature.hpp"
#include "hybridwave/transform.hpp"
#include "run_config.hpp"

namespace hybridwave::cli {

namespace fs = std::filesystem;

// ---- writers ----

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : os_(path, std::ios::binary) {
    if (!os_) throw std::runtime_error("cannot write '" + path.string() + "'");
    row_strings(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(fmt17(v));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << j.dump(2) << '\n';
}

// Row-major little-endian float64.
inline void write_f64(const fs::path& path, const rvec& values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (double v : values) {
    unsigned char b[8];
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
  }
}

inline double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// ---- transform-demo ----

struct TransformDemoRow {
  std::string mode;
  double delta_omega = 0.0;
  std::size_t M = 0;
  double error = 0.0;
};

inline cplx demo_spectrum(double w) { return std::exp(-0.25 * w * w) * std::exp(cplx(0.0, 10.0 * w)); }

// int_a^b F(w) e^{-iwt} dw by panelled Gauss-Legendre.
inline cplx truncated_transform(double a, double b, double t) {
  const int panels = std::max(16, static_cast<int>((b - a) * std::abs(t) / 2.0) + 1);
  return composite_gauss([&](double w) { return demo_spectrum(w) * std::exp(cplx(0.0, -w * t)); }, a, b, panels, 30);
}

// Periodic DFT fits on [-12, 12] against 2 sqrt(pi) e^{-(t-10)^2}; FC(Gram)
// fits on [0, 12] against quadrature of the truncated integral.
inline std::vector<TransformDemoRow> transform_demo() {
  std::vector<TransformDemoRow> rows;
  auto samples = [](double a, double b, std::size_t n) {
    cvec F(n);
    for (std::size_t j = 0; j < n; ++j) F[j] = demo_spectrum(a + (b - a) * double(j) / double(n - 1));
    return F;
  };
  for (std::size_t M : {32, 48, 64, 96, 128, 160, 192, 256}) {
    const auto e = fit_trig_expansion(samples(-12.0, 12.0, M + 1), -12.0, 12.0, ExpansionMode::Periodic);
    const cvec v = inverse_transform_from(e, -10.0, 0.05, 801, 8.0);
    double err = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
      const double t = -10.0 + 0.05 * double(n);
      err = std::max(err, std::abs(v[n] - 2.0 * std::sqrt(pi) * std::exp(-(t - 10.0) * (t - 10.0))));
    }
    rows.push_back({"periodic", 24.0 / double(M), M, err});
  }
  rvec ts;
  cvec exact;
  for (int i = 0; i <= 160; ++i) {
    ts.push_back(-20.0 + 0.5 * i);
    exact.push_back(truncated_transform(0.0, 12.0, ts.back()));
  }
  for (std::size_t n : {97, 193, 385, 769}) {
    const auto e = fit_trig_expansion(samples(0.0, 12.0, n), 0.0, 12.0, ExpansionMode::Continued);
    double err = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) err = std::max(err, std::abs(inverse_transform_at(e, ts[i]) - exact[i]));
    rows.push_back({"continued", 12.0 / double(n - 1), e.M(), err});
  }
  return rows;
}

inline void write_transform_demo(const fs::path& dir, const std::vector<TransformDemoRow>& rows) {
  CsvWriter csv(dir / "transform_demo.csv", {"mode", "delta_omega", "M", "error"});
  for (const auto& r : rows) csv.row_strings({r.mode, fmt17(r.delta_omega), std::to_string(r.M), fmt17(r.error)});
}

// ---- convolve-bench ----

struct ConvolveRow {
  std::size_t M = 0, N = 0;
  double direct_seconds = 0.0, fast_seconds = 0.0, error = 0.0;
};

// Coefficients of the continued expansion of e^{-(w-10)^2/4} e^{-8iw} on
// [8, 15] with exactly M terms; kernel 2A sinc, beta = 1, gamma = alpha dt.
inline ConvolveRow convolve_case(std::size_t M, std::size_t N, double oversample = 4.0, double dt = 0.2,
                                 bool run_direct = true) {
  require(M >= 40 && M % 2 == 0, "convolve-bench: M must be even and at least 40");
  const std::size_t n = M - 27;
  cvec F(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 8.0 + 7.0 * double(j) / double(n - 1);
    F[j] = std::exp(-0.25 * (w - 10.0) * (w - 10.0)) * std::exp(cplx(0.0, -8.0 * w));
  }
  const auto e = fit_trig_expansion(F, 8.0, 15.0, ExpansionMode::Continued);
  auto kernel = [&](double q) { return e.kernel(q); };
  const double gamma = e.alpha() * dt;
  ConvolveRow row;
  row.M = e.M();
  row.N = N;
  auto t0 = std::chrono::steady_clock::now();
  const cvec fast = plan_scaled_convolution(e.M(), N, 0, 1.0, gamma, kernel, oversample).execute(e.coeffs);
  row.fast_seconds = elapsed(t0);
  if (run_direct) {
    t0 = std::chrono::steady_clock::now();
    const cvec ref = direct_scaled_convolution(e.coeffs, kernel, 1.0, gamma, 0, N);
    row.direct_seconds = elapsed(t0);
    for (std::size_t i = 0; i < N; ++i) row.error = std::max(row.error, std::abs(fast[i] - ref[i]));
  } else {
    row.direct_seconds = row.error = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

struct ConvolveBench {
  std::vector<ConvolveRow> m_sweep, n_sweep;
};

inline ConvolveBench convolve_bench(std::ostream* log = nullptr, bool quick = false) {
  ConvolveBench b;
  const std::vector<std::size_t> ms = quick ? std::vector<std::size_t>{100, 500, 1000}
                                            : std::vector<std::size_t>{100, 500, 1000, 5000, 10000};
  const std::vector<std::size_t> ns = quick ? std::vector<std::size_t>{1000, 10000}
                                            : std::vector<std::size_t>{1000, 10000, 100000};
  for (std::size_t M : ms) {
    b.m_sweep.push_back(convolve_case(M, 10000));
    if (log) *log << "M=" << M << " error=" << b.m_sweep.back().error << "\n";
  }
  for (std::size_t N : ns) {
    b.n_sweep.push_back(convolve_case(5000, N));
    if (log) *log << "N=" << N << " error=" << b.n_sweep.back().error << "\n";
  }
  return b;
}

inline void write_convolve_bench(const fs::path& dir, const ConvolveBench& b) {
  CsvWriter m(dir / "convolve_bench_M.csv", {"M", "direct_seconds", "fast_seconds", "error"});
  for (const auto& r : b.m_sweep) m.row({double(r.M), r.direct_seconds, r.fast_seconds, r.error});
  CsvWriter n(dir / "convolve_bench_N.csv", {"N", "direct_seconds", "fast_seconds", "error"});
  for (const auto& r : b.n_sweep) n.row({double(r.N), r.direct_seconds, r.fast_seconds, r.error});
}

// ---- scatter2d / scatter-sphere ----

struct ScatterResult {
  std::vector<Vec3> all_points;      // explicit points, then grid
  std::vector<long> solved_index;    // index into rec.points or -1 (interior)
  std::size_t explicit_count = 0;
  SolutionRecord rec;
  std::size_t solves = 0;
  std::vector<rvec> reference;       // explicit points, when enabled
  double W_ref = 0.0;
  double max_error = std::numeric_limits<double>::quiet_NaN();
};

// Smallest W (multiple of 1) beyond which every source spectrum is below
// 1e-16 of its peak.
inline double automatic_reference_band(const std::vector<Source>& sources) {
  double W = 1.0;
  for (const auto& s : sources) {
    require(static_cast<bool>(s.incident.spectrum), "reference: incidence '" + to_string(s.incident.spec.kind) +
                                                        "' has no closed-form spectrum");
    double peak = 0.0;
    for (double w = 0.0; w <= 2000.0; w += 0.05) peak = std::max(peak, std::abs(s.incident.spectrum(w)));
    double w = 2000.0;
    while (w > 0.0 && std::abs(s.incident.spectrum(w)) < 1e-16 * peak) w -= 0.05;
    W = std::max(W, std::ceil(w + 0.05));
  }
  return W;
}

inline ScatterResult run_scatter(const RunConfig& cfg, std::ostream* log = nullptr) {
  ScatterResult res;
  res.all_points = observation_points(cfg);
  res.explicit_count = cfg.points.size();
  HybridConfig h = hybrid_config(cfg);
  h.points.clear();
  for (const auto& p : res.all_points) {
    if (is_exterior(cfg, p)) {
      res.solved_index.push_back(static_cast<long>(h.points.size()));
      h.points.push_back(p);
    } else {
      res.solved_index.push_back(-1);
    }
  }
  for (std::size_t i = 0; i < res.explicit_count; ++i)
    if (res.solved_index[i] < 0)
      throw InvalidArgument("observation.points[" + std::to_string(i) + "]: point lies inside the scatterer");
  const auto sources = make_sources(cfg);
  const FrequencyBackend backend = make_backend(cfg);
  TrackingOptions tr;
  tr.enabled = cfg.tracking.enabled;
  tr.relative_tol = cfg.tracking.relative_tol;
  tr.absolute_tol = cfg.tracking.absolute_tol;
  auto t0 = std::chrono::steady_clock::now();
  const SlowFieldTable tab = run_frequency_side(h, sources, backend);
  res.solves = tab.omegas.size() * sources.size();
  if (log)
    *log << cfg.scenario << ": " << res.solves << " frequency solves (" << (tab.grid.singular ? "singular" : "periodic")
         << " path, K = " << tab.K() << ") in " << elapsed(t0) << " s\n";
  t0 = std::chrono::steady_clock::now();
  res.rec = run_time_side(tab, h.times, h.oversample, tr);
  if (log) *log << cfg.scenario << ": time side in " << elapsed(t0) << " s, max |Im u_k| = " << res.rec.max_imag << "\n";
  if (cfg.reference.enabled && res.explicit_count > 0) {
    res.W_ref = cfg.reference.W_ref > 0.0 ? cfg.reference.W_ref : automatic_reference_band(sources);
    t0 = std::chrono::steady_clock::now();
    res.reference = reference_trace(sources, backend, cfg.points, cfg.times, res.W_ref,
                                    cfg.delta_omega / cfg.reference.ratio);
    res.max_error = 0.0;
    for (std::size_t i = 0; i < res.explicit_count; ++i) {
      const rvec& u = res.rec.total[static_cast<std::size_t>(res.solved_index[i])];
      for (std::size_t l = 0; l < u.size(); ++l) res.max_error = std::max(res.max_error, std::abs(u[l] - res.reference[i][l]));
    }
    if (log) *log << cfg.scenario << ": reference (W_ref = " << res.W_ref << ") in " << elapsed(t0) << " s\n";
  }
  return res;
}

inline std::size_t nearest_time_index(const TimeGrid& g, double t) {
  const double x = std::round((t - g.t0) / g.dt);
  if (x < 0.0 || x > double(g.count - 1)) throw InvalidArgument("output.snapshot_times: time outside the time grid");
  return static_cast<std::size_t>(x);
}

inline void write_scatter(const fs::path& dir, const RunConfig& cfg, const ScatterResult& res) {
  const auto& rec = res.rec;
  const bool with_ref = !res.reference.empty();
  for (std::size_t i = 0; i < res.explicit_count; ++i) {
    const rvec& u = rec.total[static_cast<std::size_t>(res.solved_index[i])];
    CsvWriter csv(dir / ("trace_" + std::to_string(i) + ".csv"),
                  with_ref ? std::vector<std::string>{"t", "value", "reference", "error"}
                           : std::vector<std::string>{"t", "value"});
    for (std::size_t l = 0; l < u.size(); ++l) {
      if (with_ref)
        csv.row({rec.times.time(l), u[l], res.reference[i][l], u[l] - res.reference[i][l]});
      else
        csv.row({rec.times.time(l), u[l]});
    }
  }
  if (!rec.active.empty()) {
    std::vector<std::string> header{"t"};
    for (int k : rec.partitions) header.push_back("k" + std::to_string(k));
    CsvWriter csv(dir / "active_partitions.csv", header);
    for (std::size_t l = 0; l < rec.times.count; ++l) {
      std::vector<std::string> cells{fmt17(rec.times.time(l))};
      for (const auto& a : rec.active) cells.push_back(a[l] ? "1" : "0");
      csv.row_strings(cells);
    }
  }
  if (!cfg.grid.empty()) {
    const std::size_t n = cfg.grid.nx * cfg.grid.ny;
    for (std::size_t s = 0; s < cfg.output.snapshot_times.size(); ++s) {
      const std::size_t l = nearest_time_index(rec.times, cfg.output.snapshot_times[s]);
      rvec v(n);
      for (std::size_t g = 0; g < n; ++g) {
        const long idx = res.solved_index[res.explicit_count + g];
        v[g] = idx < 0 ? std::numeric_limits<double>::quiet_NaN() : rec.total[static_cast<std::size_t>(idx)][l];
      }
      const std::string stem = "snapshot_" + std::to_string(s);
      write_f64(dir / (stem + ".bin"), v);
      json side = {{"nx", cfg.grid.nx},
                   {"ny", cfg.grid.ny},
                   {"x", {cfg.grid.x0, cfg.grid.x1}},
                   {"y", {cfg.grid.y0, cfg.grid.y1}},
                   {"z", cfg.grid.z},
                   {"time", rec.times.time(l)},
                   {"dtype", "float64"},
                   {"byte_order", "little"},
                   {"layout", "row-major, x fastest"},
                   {"interior", "nan"}};
      write_json(dir / (stem + ".json"), side);
    }
  }
  json summary = {{"scenario", cfg.scenario},
                  {"frequency_solves", res.solves},
                  {"partitions", rec.partitions},
                  {"max_imag", rec.max_imag}};
  if (with_ref) {
    summary["W_ref"] = res.W_ref;
    summary["max_error"] = res.max_error;
  }
  write_json(dir / "summary.json", summary);
}

// ---- convergence ----

struct ConvergenceRow {
  double delta_omega = 0.0;
  double error = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double max_imag = 0.0;
};

// Max all-time error at the explicit points of each delta_omega run against
// the reference_delta_omega run.
inline std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, std::ostream* log = nullptr) {
  require(!cfg.convergence.delta_omegas.empty(), "convergence.delta_omegas: need at least one spacing");
  require(!cfg.points.empty(), "observation.points: convergence needs explicit points");
  const auto sources = make_sources(cfg);
  const FrequencyBackend backend = make_backend(cfg);
  auto run = [&](double dw, double& imag) {
    HybridConfig h = hybrid_config(cfg);
    h.points = cfg.points;
    h.delta_omega = dw;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rec = run_hybrid(h, sources, backend);
    if (log) *log << "delta_omega = " << dw << ": " << elapsed(t0) << " s\n";
    imag = rec.max_imag;
    return rec.total;
  };
  double imag = 0.0;
  const auto ref = run(cfg.convergence.reference_delta_omega, imag);
  std::vector<ConvergenceRow> rows;
  for (double dw : cfg.convergence.delta_omegas) {
    ConvergenceRow r;
    r.delta_omega = dw;
    const auto u = run(dw, r.max_imag);
    r.max_imag = std::max(r.max_imag, imag);
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t l = 0; l < u[i].size(); ++l) r.error = std::max(r.error, std::abs(u[i][l] - ref[i][l]));
    if (!rows.empty()) r.ratio = rows.back().error / r.error;
    rows.push_back(r);
  }
  return rows;
}

inline void write_convergence(const fs::path& dir, const std::vector<ConvergenceRow>& rows) {
  CsvWriter csv(dir / "convergence.csv", {"delta_omega", "error", "ratio"});
  for (const auto& r : rows) csv.row({r.delta_omega, r.error, r.ratio});
}

}  // namespace hybridwave::cli
