#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hybridwave/core.hpp"
#include "hybridwave/filon.hpp"
#include "hybridwave/helmholtz2d.hpp"
#include "hybridwave/mie.hpp"
#include "hybridwave/parallel.hpp"
#include "hybridwave/signals.hpp"
#include "hybridwave/transform.hpp"

// Frequency/time hybrid solver. The scattered field u with u = b on the
// boundary, b(r, t) = sum over sources of a(t - p.r/c), is split over the
// window partition as u = sum_k u_k with
//   u_k(r, t) = (1/2pi) int_{-W}^{W} U_k^slow(r, w) e^{-iw(t - s_k)} dw,
//   U_k^slow(r, w) = B_k^slow(w) U_p(r, w),
// where U_p is the frequency-domain field for boundary data e^{i kappa p.r}.
namespace hybridwave {

// U_p(r, omega) for unit plane-wave boundary data along direction p.
struct FrequencyBackend {
  std::string name;
  int dim = 3;
  std::function<cvec(double omega, const Vec3& p, const std::vector<Vec3>& points)> solve;
  // omega -> 0 limit
  std::function<cvec(const Vec3& p, const std::vector<Vec3>& points)> static_limit;
};

namespace detail {
inline std::vector<Vec2> planar(const std::vector<Vec3>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& q : pts) out.push_back({q[0], q[1]});
  return out;
}
inline Vec2 planar_direction(const Vec3& p) {
  require(std::abs(p[2]) < 1e-14, "2D backend: incidence direction must lie in the plane");
  return {p[0], p[1]};
}
}  // namespace detail

// Sound-soft disc: U_p = -(series scattered field).
inline FrequencyBackend mie_disc_backend(double a, double c = 1.0) {
  FrequencyBackend b;
  b.name = "mie-disc";
  b.dim = 2;
  b.solve = [=](double omega, const Vec3& p, const std::vector<Vec3>& pts) {
    cvec u = disc_scatter(a, omega, detail::planar_direction(p), detail::planar(pts), c);
    for (auto& v : u) v = -v;
    return u;
  };
  b.static_limit = [](const Vec3&, const std::vector<Vec3>& pts) { return cvec(pts.size(), cplx(1.0)); };
  return b;
}

inline FrequencyBackend mie_sphere_backend(double a, double c = 1.0) {
  FrequencyBackend b;
  b.name = "mie-sphere";
  b.dim = 3;
  b.solve = [=](double omega, const Vec3& p, const std::vector<Vec3>& pts) {
    cvec u = sphere_scatter(a, omega, p, pts, c);
    for (auto& v : u) v = -v;
    return u;
  };
  b.static_limit = [=](const Vec3&, const std::vector<Vec3>& pts) {
    cvec u(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      u[i] = a / std::sqrt(pts[i][0] * pts[i][0] + pts[i][1] * pts[i][1] + pts[i][2] * pts[i][2]);
    return u;
  };
  return b;
}

// CFIE/Nystrom solve on a smooth closed curve.
inline FrequencyBackend nystrom_backend(const TrigCurve& shape, int n_nodes, double c = 1.0,
                                        SolveOptions options = {}) {
  auto curve = std::make_shared<const Curve>(discretize(shape, n_nodes));
  FrequencyBackend b;
  b.name = "nystrom-" + shape.name;
  b.dim = 2;
  b.solve = [=](double omega, const Vec3& p, const std::vector<Vec3>& pts) {
    return solve_plane_wave(*curve, omega, detail::planar_direction(p), detail::planar(pts), c, options);
  };
  b.static_limit = [](const Vec3&, const std::vector<Vec3>& pts) { return cvec(pts.size(), cplx(1.0)); };
  return b;
}

// No scatterer: U_p = e^{i kappa p.r}, so u reproduces the boundary data b.
inline FrequencyBackend free_space_backend(int dim, double c = 1.0) {
  require(dim == 2 || dim == 3, "free_space_backend: dimension must be 2 or 3");
  FrequencyBackend b;
  b.name = "free-space";
  b.dim = dim;
  b.solve = [=](double omega, const Vec3& p, const std::vector<Vec3>& pts) {
    cvec u(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      u[i] = std::exp(I * (omega / c * (p[0] * pts[i][0] + p[1] * pts[i][1] + p[2] * pts[i][2])));
    return u;
  };
  b.static_limit = [](const Vec3&, const std::vector<Vec3>& pts) { return cvec(pts.size(), cplx(1.0)); };
  return b;
}

enum class SingularPolicy { automatic, always, never };

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.1;
  std::size_t count = 100;

  double time(std::size_t l) const { return t0 + static_cast<double>(l) * dt; }
};

struct HybridConfig {
  double W = 24.0;
  double delta_omega = 0.12;
  double omega_c = 0.0;  // 0 selects W/16
  double H = 10.0;
  double T_end = 10.0;
  double dt_fine = 0.0;  // 0 selects 2 pi / (20 W)
  double oversample = 4.0;
  double wave_speed = 1.0;
  int fcc_count = 4;
  int fcc_points = 8;
  double fcc_q = 9.1;
  // center of the time interval resolved by the periodic expansion, relative to s_k
  double time_offset = 0.0;
  SingularPolicy singular = SingularPolicy::automatic;
  // |B(0)| above this engages the 2D singular path
  double singular_threshold = 1e-12;
  TimeGrid times;
  std::vector<Vec3> points;

  double cutoff() const { return omega_c > 0.0 ? omega_c : W / 16.0; }
  double fine_step() const { return dt_fine > 0.0 ? dt_fine : two_pi / (20.0 * W); }
};

// Nonnegative frequencies at which U_p is needed. Periodic layout:
// j * dw for j = 0..M/2 on [-W, W] (M = 2W/dw). Singular layout:
// omega_c + j dw for j = 0..n-1 on [omega_c, W], then the FCC nodes.
struct FrequencyGrid {
  double W = 0.0, delta = 0.0, omega_c = 0.0;
  bool singular = false;
  std::size_t M = 0;       // periodic: intervals on [-W, W]
  std::size_t n_side = 0;  // singular: samples on [omega_c, W]
  rvec smooth;             // nonnegative part of F^smooth
  std::optional<FCCRule> sing;

  rvec positive() const {
    rvec out = smooth;
    if (sing) out.insert(out.end(), sing->nodes().begin(), sing->nodes().end());
    return out;
  }
  // J: total count over both signs
  std::size_t J() const {
    if (!singular) return M;
    return 2 * n_side + sing->signed_size();
  }
};

namespace detail {
inline std::size_t exact_count(double span, double step, const char* what) {
  const double r = span / step;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
    throw InvalidArgument(std::string("delta_omega: ") + what + " is not an integer multiple of delta_omega");
  return static_cast<std::size_t>(n);
}
}  // namespace detail

inline FrequencyGrid build_frequency_grid(const HybridConfig& cfg, bool singular) {
  require(cfg.W > 0.0, "W: bandlimit must be positive");
  require(cfg.delta_omega > 0.0, "delta_omega: must be positive");
  FrequencyGrid g;
  g.W = cfg.W;
  g.delta = cfg.delta_omega;
  g.singular = singular;
  if (!singular) {
    g.M = detail::exact_count(2.0 * cfg.W, cfg.delta_omega, "2W");
    if (g.M % 2) throw InvalidArgument("delta_omega: 2W / delta_omega must be even");
    for (std::size_t j = 0; j <= g.M / 2; ++j) g.smooth.push_back(double(j) * cfg.delta_omega);
    return g;
  }
  g.omega_c = cfg.cutoff();
  require(g.omega_c < cfg.W, "omega_c: cutoff must be below W");
  const std::size_t intervals = detail::exact_count(cfg.W - g.omega_c, cfg.delta_omega, "W - omega_c");
  g.n_side = intervals + 1;
  for (std::size_t j = 0; j < g.n_side; ++j)
    g.smooth.push_back(j + 1 == g.n_side ? cfg.W : g.omega_c + double(j) * cfg.delta_omega);
  g.sing.emplace(build_graded_mesh(g.omega_c, cfg.fcc_count, cfg.fcc_q), cfg.fcc_points);
  return g;
}

struct Source {
  Incident incident;
  Vec3 direction() const { return incident.spec.direction; }
};

// U_k^slow(r_i, omega_j) at the nonnegative frequencies of the grid;
// negative frequencies follow from U(-w) = conj U(w).
struct SlowFieldTable {
  FrequencyGrid grid;
  WindowPartition partition;
  std::vector<Vec3> points;
  rvec omegas;
  // values[k][i][j]
  std::vector<std::vector<cvec>> values;
  // B_k^slow per source: bslow[s][k][j]
  std::vector<std::vector<cvec>> bslow;
  double time_offset = 0.0;

  int K() const { return partition.K(); }
};

// B_k^slow(omega) = int_{-H}^{H} w(t) a(t + s_k) e^{i omega t} dt for every k.
inline std::vector<cvec> slow_spectra(const Incident& inc, const WindowPartition& part, double dt_fine,
                                      const rvec& omegas) {
  std::vector<cvec> out(static_cast<std::size_t>(part.K()));
  parallel_for(out.size(), [&](std::size_t k) {
    const TimeSignal ak = windowed_recentered_signal(inc.signal, part, static_cast<int>(k), dt_fine);
    out[k] = forward_windowed_transform(ak, omegas);
  });
  return out;
}

inline bool needs_singular_path(const HybridConfig& cfg, int dim, const std::vector<Source>& sources,
                                const WindowPartition& part) {
  if (dim == 3 || cfg.singular == SingularPolicy::never) return false;
  if (cfg.singular == SingularPolicy::always) return true;
  for (const auto& s : sources) {
    const auto b0 = slow_spectra(s.incident, part, cfg.fine_step(), {0.0});
    for (const auto& v : b0)
      if (std::abs(v[0]) > cfg.singular_threshold) return true;
  }
  return false;
}

// Steps F1-F5: one frequency-domain solve per nonnegative frequency and
// source direction, reused for every partition.
inline SlowFieldTable run_frequency_side(const HybridConfig& cfg, const std::vector<Source>& sources,
                                         const FrequencyBackend& backend) {
  require(!sources.empty(), "sources: at least one incidence is required");
  require(!cfg.points.empty(), "points: at least one observation point is required");
  require(cfg.H > 0.0, "H: window width must be positive");
  require(cfg.oversample >= 1.0, "oversample: must be at least 1");
  SlowFieldTable tab;
  tab.partition = build_partition(cfg.T_end, cfg.H);
  tab.grid = build_frequency_grid(cfg, needs_singular_path(cfg, backend.dim, sources, tab.partition));
  tab.points = cfg.points;
  tab.time_offset = cfg.time_offset;
  tab.omegas = tab.grid.positive();
  const std::size_t nw = tab.omegas.size(), nr = cfg.points.size();
  const auto K = static_cast<std::size_t>(tab.K());

  for (const auto& s : sources) tab.bslow.push_back(slow_spectra(s.incident, tab.partition, cfg.fine_step(), tab.omegas));

  tab.values.assign(K, std::vector<cvec>(nr, cvec(nw, cplx(0.0))));
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const Vec3 p = sources[si].direction();
    std::vector<cvec> up(nw);
    parallel_for(nw, [&](std::size_t j) {
      const double w = tab.omegas[j];
      up[j] = w == 0.0 ? backend.static_limit(p, cfg.points) : backend.solve(w, p, cfg.points);
    });
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nw; ++j) tab.values[k][i][j] += tab.bslow[si][k][j] * up[j][i];
  }
  return tab;
}

// Time-side evaluator for one partition: holds the convolution plan for
// the shifted grid t_l - s_k.
class PartitionEvaluator {
 public:
  PartitionEvaluator(const SlowFieldTable& tab, int k, const TimeGrid& times, double oversample)
      : tab_(&tab), k_(k), times_(times), offset_(tab.time_offset) {
    const auto& g = tab.grid;
    const double t0 = times.t0 - tab.partition.centers[static_cast<std::size_t>(k)];
    if (!g.singular) {
      plan_.emplace(g.M, 2.0 * g.W, g.W, t0 - offset_, times.dt, times.count, oversample);
    } else {
      // continued expansions on [omega_c, W] and [-W, -omega_c] share (M, P, A)
      const int C = 27 + static_cast<int>((g.n_side + 27) % 2);
      const double h = (g.W - g.omega_c) / double(g.n_side - 1);
      plan_.emplace(g.n_side + static_cast<std::size_t>(C), double(g.n_side + static_cast<std::size_t>(C)) * h,
                    0.5 * (g.W - g.omega_c), t0, times.dt, times.count, oversample);
    }
  }

  // u_k(r_i, t_l) for l = 0..count-1 (complex; imaginary part is roundoff).
  cvec operator()(std::size_t i) const {
    const auto& g = tab_->grid;
    const cvec& row = tab_->values[static_cast<std::size_t>(k_)][i];
    cvec out;
    if (!g.singular) {
      const std::size_t h = g.M / 2;
      cvec F(g.M + 1);
      for (std::size_t j = 0; j <= h; ++j) {
        const cplx v = row[j] * std::exp(cplx(0.0, -g.smooth[j] * offset_));
        F[h + j] = v;
        F[h - j] = std::conj(v);
      }
      F[h] = row[0].real();
      out = (*plan_)(fit_trig_expansion(F, -g.W, g.W, ExpansionMode::Periodic));
    } else {
      const std::size_t n = g.n_side;
      cvec Fp(row.begin(), row.begin() + static_cast<long>(n)), Fm(n);
      for (std::size_t j = 0; j < n; ++j) Fm[j] = std::conj(Fp[n - 1 - j]);
      out = (*plan_)(fit_trig_expansion(Fp, g.omega_c, g.W, ExpansionMode::Continued));
      const cvec neg = (*plan_)(fit_trig_expansion(Fm, -g.W, -g.omega_c, ExpansionMode::Continued));
      const cvec vs(row.begin() + static_cast<long>(n), row.end());
      cvec vs_conj(vs.size());
      for (std::size_t j = 0; j < vs.size(); ++j) vs_conj[j] = std::conj(vs[j]);
      const double sk = tab_->partition.centers[static_cast<std::size_t>(k_)];
      for (std::size_t l = 0; l < out.size(); ++l) {
        const double tau = times_.time(l) - sk;
        out[l] += neg[l] + g.sing->integrate(vs, tau) + g.sing->integrate(vs_conj, -tau);
      }
    }
    for (auto& v : out) v /= two_pi;
    return out;
  }

 private:
  const SlowFieldTable* tab_;
  int k_;
  TimeGrid times_;
  double offset_;
  std::optional<InverseTransformPlan> plan_;
};

// u_k(r_i, .) on the grid for one (k, i).
inline cvec assemble_uk(const SlowFieldTable& tab, int k, std::size_t i, const TimeGrid& times,
                        double oversample = 4.0) {
  return PartitionEvaluator(tab, k, times, oversample)(i);
}

struct SolutionRecord {
  std::vector<Vec3> points;
  TimeGrid times;
  // evaluated partition indices and their centers
  std::vector<int> partitions;
  rvec centers;
  // uk[j][i][l] for partition partitions[j]
  std::vector<std::vector<rvec>> uk;
  // largest |Im u_k| seen
  double max_imag = 0.0;
  // active[k][l]
  std::vector<std::vector<char>> active;
  // total[i][l]
  std::vector<rvec> total;

  int K() const { return static_cast<int>(uk.size()); }
};

// active[k][l] = max_i |u_k(r_i, t_l)| >= tol.
inline std::vector<std::vector<char>> track_active_partitions(const std::vector<std::vector<rvec>>& uk,
                                                              double tol) {
  std::vector<std::vector<char>> active(uk.size());
  for (std::size_t k = 0; k < uk.size(); ++k) {
    const std::size_t nt = uk[k].empty() ? 0 : uk[k][0].size();
    active[k].assign(nt, 0);
    for (std::size_t l = 0; l < nt; ++l) {
      double m = 0.0;
      for (const auto& row : uk[k]) m = std::max(m, std::abs(row[l]));
      active[k][l] = m >= tol ? 1 : 0;
    }
  }
  return active;
}

// Relative tracking: tolerance rel * (running max over frames so far of
// max_{k, i} |u_k|).
inline std::vector<std::vector<char>> track_active_partitions_relative(const std::vector<std::vector<rvec>>& uk,
                                                                       double rel = 1e-6) {
  std::vector<std::vector<char>> active(uk.size());
  const std::size_t nt = uk.empty() || uk[0].empty() ? 0 : uk[0][0].size();
  for (auto& a : active) a.assign(nt, 0);
  double running = 0.0;
  for (std::size_t l = 0; l < nt; ++l) {
    rvec m(uk.size(), 0.0);
    for (std::size_t k = 0; k < uk.size(); ++k) {
      for (const auto& row : uk[k]) m[k] = std::max(m[k], std::abs(row[l]));
      running = std::max(running, m[k]);
    }
    for (std::size_t k = 0; k < uk.size(); ++k) active[k][l] = running > 0.0 && m[k] >= rel * running ? 1 : 0;
  }
  return active;
}

// u = sum of active u_k.
inline std::vector<rvec> total_field(const SolutionRecord& rec) {
  std::vector<rvec> u(rec.points.size(), rvec(rec.times.count, 0.0));
  for (std::size_t k = 0; k < rec.uk.size(); ++k)
    for (std::size_t i = 0; i < rec.points.size(); ++i)
      for (std::size_t l = 0; l < rec.times.count; ++l)
        if (rec.active.empty() || rec.active[k][l]) u[i][l] += rec.uk[k][i][l];
  return u;
}

// Incident field -sum_s a_s(t - p.r/c).
inline double incident_field(const std::vector<Source>& sources, const Vec3& r, double t) {
  double v = 0.0;
  for (const auto& s : sources) {
    const Vec3 p = s.direction();
    v -= s.incident(t - (p[0] * r[0] + p[1] * r[1] + p[2] * r[2]) / s.incident.spec.wave_speed);
  }
  return v;
}

// Scattered plus incident field.
inline std::vector<rvec> total_field(const SolutionRecord& rec, const std::vector<Source>& sources) {
  std::vector<rvec> u = total_field(rec);
  for (std::size_t i = 0; i < rec.points.size(); ++i)
    for (std::size_t l = 0; l < rec.times.count; ++l) u[i][l] += incident_field(sources, rec.points[i], rec.times.time(l));
  return u;
}

struct TrackingOptions {
  bool enabled = false;
  double relative_tol = 1e-6;
  // when set, overrides the relative rule
  std::optional<double> absolute_tol;
};

// Partitions whose windows meet [t_first - lookback, t_last].
inline std::vector<int> select_partitions(const WindowPartition& part, const TimeGrid& times, double lookback) {
  std::vector<int> ks;
  const double lo = times.t0 - lookback, hi = times.time(times.count - 1);
  for (int k = 0; k < part.K(); ++k) {
    const double s = part.centers[static_cast<std::size_t>(k)];
    if (s - part.H <= hi && s + part.H >= lo) ks.push_back(k);
  }
  return ks;
}

// Steps T0-T5 over every (k, r); `partitions` restricts k (empty: all).
inline SolutionRecord run_time_side(const SlowFieldTable& tab, const TimeGrid& times, double oversample = 4.0,
                                    const TrackingOptions& tracking = {}, std::vector<int> partitions = {}) {
  require(times.count > 0 && times.dt > 0.0, "times: need a positive step and at least one sample");
  if (partitions.empty())
    for (int k = 0; k < tab.K(); ++k) partitions.push_back(k);
  for (int k : partitions)
    if (k < 0 || k >= tab.K()) throw std::out_of_range("run_time_side: partition index out of range");
  SolutionRecord rec;
  rec.points = tab.points;
  rec.times = times;
  rec.partitions = partitions;
  for (int k : partitions) rec.centers.push_back(tab.partition.centers[static_cast<std::size_t>(k)]);
  const std::size_t K = partitions.size(), nr = tab.points.size();
  rec.uk.assign(K, std::vector<rvec>(nr));
  std::vector<double> imag(K * nr, 0.0);
  std::vector<std::optional<PartitionEvaluator>> evals(K);
  parallel_for(K, [&](std::size_t j) { evals[j].emplace(tab, partitions[j], times, oversample); });
  parallel_for(K * nr, [&](std::size_t idx) {
    const std::size_t j = idx / nr, i = idx % nr;
    const cvec u = (*evals[j])(i);
    rvec re(u.size());
    double im = 0.0;
    for (std::size_t l = 0; l < u.size(); ++l) {
      re[l] = u[l].real();
      im = std::max(im, std::abs(u[l].imag()));
    }
    rec.uk[j][i] = std::move(re);
    imag[idx] = im;
  });
  rec.max_imag = imag.empty() ? 0.0 : *std::max_element(imag.begin(), imag.end());
  if (tracking.enabled) {
    rec.active = tracking.absolute_tol ? track_active_partitions(rec.uk, *tracking.absolute_tol)
                                       : track_active_partitions_relative(rec.uk, tracking.relative_tol);
  }
  rec.total = total_field(rec);
  return rec;
}

inline SolutionRecord run_hybrid(const HybridConfig& cfg, const std::vector<Source>& sources,
                                 const FrequencyBackend& backend, const TrackingOptions& tracking = {}) {
  return run_time_side(run_frequency_side(cfg, sources, backend), cfg.times, cfg.oversample, tracking);
}

// Brute-force reference u(r, t) = (1/2pi) int B(w) U_p(r, w) e^{-iwt} dw by
// the trapezoid rule with step dw on [-W_ref, W_ref], using closed-form
// source spectra.
inline std::vector<rvec> reference_trace(const std::vector<Source>& sources, const FrequencyBackend& backend,
                                         const std::vector<Vec3>& points, const TimeGrid& times, double W_ref,
                                         double dw) {
  require(dw > 0.0 && W_ref > 0.0, "reference_trace: need positive bandwidth and step");
  for (const auto& s : sources)
    require(static_cast<bool>(s.incident.spectrum), "reference_trace: source has no closed-form spectrum");
  const auto n = static_cast<std::size_t>(std::ceil(W_ref / dw - 1e-9));
  std::vector<cvec> field(n + 1, cvec(points.size(), cplx(0.0)));
  parallel_for(n + 1, [&](std::size_t j) {
    const double w = double(j) * dw;
    for (const auto& s : sources) {
      const cvec up = w == 0.0 ? backend.static_limit(s.direction(), points) : backend.solve(w, s.direction(), points);
      const cplx b = s.incident.spectrum(w);
      for (std::size_t i = 0; i < points.size(); ++i) field[j][i] += b * up[i];
    }
  });
  std::vector<rvec> out(points.size(), rvec(times.count, 0.0));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t l = 0; l < times.count; ++l) {
      const double t = times.time(l);
      double s = 0.5 * field[0][i].real();
      for (std::size_t j = 1; j <= n; ++j) {
        const double wt = j == n ? 0.5 : 1.0;
        s += wt * (field[j][i] * std::exp(cplx(0.0, -double(j) * dw * t))).real();
      }
      out[i][l] = s * dw / pi;
    }
  }
  return out;
}

}  // namespace hybridwave
