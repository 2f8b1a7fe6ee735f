// Acceptance run: one [PASS]/[FAIL] line per criterion, details indented.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "../unit/oracles.hpp"
#include "hybridwave/filon.hpp"
#include "hybridwave/helmholtz2d.hpp"
#include "hybridwave/hybrid.hpp"
#include "hybridwave/mie.hpp"
#include "run_config.hpp"
#include "scenarios.hpp"

using namespace hybridwave;
using namespace hybridwave::cli;

namespace {

const std::string source_dir = HYBRIDWAVE_SOURCE_DIR;
int failures = 0;

void detail(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  std::printf("    ");
  std::printf(fmt, a, b, c, d);
  std::printf("\n");
  std::fflush(stdout);
}

void verdict(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double max_diff(const std::vector<rvec>& a, const std::vector<rvec>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t l = 0; l < a[i].size(); ++l) e = std::max(e, std::abs(a[i][l] - b[i][l]));
  return e;
}

RunConfig shipped(const std::string& name) { return parse_config(source_dir + "/configs/" + name + ".json"); }

void scaled_convolution() {
  const ConvolveRow a = convolve_case(1000, 10000);
  detail("M=1000 N=10000: error %.3e (direct %.2f s, fast %.4f s)", a.error, a.direct_seconds, a.fast_seconds);
  const ConvolveRow b = convolve_case(5000, 100000);
  detail("M=5000 N=100000: error %.3e (direct %.2f s, fast %.4f s)", b.error, b.direct_seconds, b.fast_seconds);
  verdict(1, a.error <= 1e-6 && b.error <= 1e-7, "scaled convolution fast vs direct");
}

void fourier_quadrature() {
  const auto rows = transform_demo();
  double best = 1.0;
  std::vector<TransformDemoRow> fc;
  for (const auto& r : rows) {
    detail(r.mode == "periodic" ? "periodic  dw=%.5f M=%.0f error %.3e" : "continued dw=%.5f M=%.0f error %.3e",
           r.delta_omega, double(r.M), r.error);
    if (r.mode == "periodic") best = std::min(best, r.error);
    else fc.push_back(r);
  }
  const double slope = std::log(fc.front().error / fc.back().error) / std::log(fc.front().delta_omega / fc.back().delta_omega);
  bool monotone = true;
  for (std::size_t i = 1; i < fc.size(); ++i) monotone = monotone && fc[i].error < fc[i - 1].error;
  detail("periodic best %.3e; FC slope %.2f over %.0f halvings", best, slope, double(fc.size() - 1));
  verdict(2, best <= 1e-12 && std::abs(slope - 10.0) <= 1.0 && monotone && fc.size() >= 4,
          "Fourier quadrature convergence (periodic and FC)");
}

cplx log_model(double w) { return 1.0 / std::log(w / 2.0); }

void fcc_rule() {
  bool ok = true;
  for (int count : {4, 8, 16}) {
    FCCRule rule(build_graded_mesh(1.0, count, 9.1), 8);
    cvec values;
    for (double w : rule.nodes()) values.push_back(log_model(w));
    double worst = 0.0;
    for (double t : {0.0, 10.0, 100.0, 1e4}) {
      const cplx ref = oracles::oscillatory_integral(log_model, 0.0, 1.0, t, true);
      worst = std::max(worst, std::abs(rule.integrate(values, t) - ref));
    }
    detail(count == 4 ? "graded mesh count %.0f: max error %.3e (criterion setting)"
                      : "graded mesh count %.0f: max error %.3e (information)",
           double(count), worst);
    if (count == 4) ok = worst <= 1e-8;
  }
  FCCRule rule(build_graded_mesh(1.0, 4, 9.1), 8);
  cvec values;
  for (double w : rule.nodes()) values.push_back(log_model(w));
  auto timed = [&](double t) {
    double best = 1e9;
    for (int rep = 0; rep < 5; ++rep) {
      cplx sink = 0.0;
      const auto a = std::chrono::steady_clock::now();
      for (int r = 0; r < 2000; ++r) sink += rule.integrate(values, t + 1e-9 * r);
      best = std::min(best, elapsed(a));
      if (!std::isfinite(sink.real())) best = 1e9;
    }
    return best;
  };
  const double t0 = timed(0.0), t4 = timed(1e4);
  detail("cost t=0 %.4f s, t=1e4 %.4f s (2000 evaluations)", t0, t4);
  verdict(3, ok && t4 <= 2.0 * t0, "graded FCC rule on a vanishing-log F");
}

void frequency_solver_2d() {
  bool ok = true;
  const Curve circle = discretize(circle_curve(), 256);
  for (double w : {2.404826, 5.0, 12.0}) {
    const cplx u = solve_plane_wave(circle, w, {1.0, 0.0}, {{2.0, 0.0}})[0];
    const cplx ref = -disc_scatter(1.0, w, {1.0, 0.0}, {{2.0, 0.0}})[0];
    detail("disc omega=%.6f: error %.3e", w, std::abs(u - ref));
    ok = ok && std::abs(u - ref) <= 1e-8;
  }
  const Vec2 p{2.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0)};
  std::vector<cplx> u;
  for (int n : {96, 192, 384, 768}) u.push_back(solve_plane_wave(discretize(kite_curve(), n), 12.0, p, {{2.0, 2.0}})[0]);
  for (std::size_t k = 1; k < u.size(); ++k) {
    const double d = std::abs(u[k] - u[k - 1]);
    detail("kite N=%.0f vs N=%.0f: change %.3e", 96.0 * (1 << k), 48.0 * (1 << k), d);
    if (k >= 2) {
      const double prev = std::abs(u[k - 1] - u[k - 2]);
      ok = ok && (d <= 1e-4 * prev || d <= 1e-10);
    }
  }
  ok = ok && std::abs(u[3] - u[2]) <= 1e-10;
  verdict(4, ok, "2D CFIE solver vs disc series and kite self-convergence");
}

double kite_imag = 0.0;

void kite_convergence() {
  const RunConfig cfg = shipped("kite");
  const auto rows = run_convergence(cfg);
  bool ok = rows.size() >= 4;
  double prev_factor = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail("dw=%.4f: max all-time error %.3e, factor %.3e", rows[i].delta_omega, rows[i].error, rows[i].ratio);
    kite_imag = std::max(kite_imag, rows[i].max_imag);
    if (i == 0) continue;
    ok = ok && rows[i].ratio >= 4.0;
    if (rows[i].error > 1e-12) ok = ok && rows[i].ratio > prev_factor;
    prev_factor = rows[i].ratio;
  }
  verdict(5, ok, "kite convergence in delta omega is superalgebraic");
}

double scatter_imag = 0.0;

void sphere_round_trip() {
  const ScatterResult s = run_scatter(shipped("sphere"));
  detail("W=6.5 sphere at (-1.8,0,0): max error %.3e (%.0f solves)", s.max_error, double(s.solves));
  const ScatterResult w = run_scatter(shipped("wideband"));
  detail("W=45 wideband at (2.5,0,0): max error %.3e (%.0f solves)", w.max_error, double(w.solves));
  scatter_imag = std::max(s.rec.max_imag, w.rec.max_imag);
  verdict(6, s.max_error <= 1e-6 && w.max_error <= 2.2e-4, "sphere round trip against the exact reference");
}

void properties() {
  std::mt19937_64 rng(20240611);
  const WindowPartition part = build_partition(1000.0, 10.0);
  std::uniform_real_distribution<double> ut(0.0, 1000.0);
  double pou = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double t = ut(rng);
    double s = 0.0;
    for (int k = 0; k < part.K(); ++k) s += window_value(part, k, t);
    pou = std::max(pou, std::abs(s - 1.0));
  }
  detail("partition of unity: max |sum w_k - 1| = %.3e", pou);

  const RunConfig sc = shipped("sphere");
  HybridConfig h = hybrid_config(sc);
  const auto be = make_backend(sc);
  IncidentSpec a = sc.incidence[0];
  IncidentSpec b = a;
  b.direction = {0.0, 0.6, 0.8};
  b.delay = 5.0;
  b.sigma = 1.0;
  const auto ua = run_hybrid(h, {{make_incident(a)}}, be);
  const auto ub = run_hybrid(h, {{make_incident(b)}}, be);
  IncidentSpec a3 = a, bm = b;
  a3.amplitude *= 3.0;
  bm.amplitude *= -0.5;
  const auto uc = run_hybrid(h, {{make_incident(a3)}, {make_incident(bm)}}, be);
  std::vector<rvec> expect = ua.total;
  for (std::size_t i = 0; i < expect.size(); ++i)
    for (std::size_t l = 0; l < expect[i].size(); ++l) expect[i][l] = 3.0 * ua.total[i][l] - 0.5 * ub.total[i][l];
  const double lin = max_diff(uc.total, expect);
  const double imag = std::max({kite_imag, scatter_imag, ua.max_imag, ub.max_imag, uc.max_imag});
  detail("linearity 3 u[a] - u[b]/2: %.3e; max |Im| of traces %.3e", lin, imag);

  HybridConfig lc;
  lc.W = 12.0;
  lc.delta_omega = 0.125;
  lc.T_end = 1.0e4 + 60.0;
  lc.points = {{-2.0, 0.0, 0.0}};
  IncidentSpec m;
  m.omega0 = 6.0;
  m.sigma = 2.0;
  m.delay = 10.0;
  const auto tab = run_frequency_side(lc, {{make_incident(m)}}, mie_sphere_backend(1.0));
  const TimeGrid early{5.0, 0.1, 100}, late{1.0e4 - 5.0, 0.1, 100};
  const auto ke = select_partitions(tab.partition, early, 0.0), kl = select_partitions(tab.partition, late, 0.0);
  auto best = [&](const TimeGrid& g, const std::vector<int>& ks) {
    double t = 1e9;
    for (int rep = 0; rep < 7; ++rep) {
      const auto s = std::chrono::steady_clock::now();
      run_time_side(tab, g, 4.0, {}, ks);
      t = std::min(t, elapsed(s));
    }
    return t;
  };
  const double te = best(early, ke), tl = best(late, kl);
  detail("time leaping: t~10 %.4f s, t~1e4 %.4f s (%.0f partitions each)", te, tl, double(ke.size()));
  verdict(7, pou <= 1e-14 && imag <= 1e-11 && lin <= 1e-13 && ke.size() == kl.size() && tl <= 2.0 * te,
          "partition of unity, reality, linearity, time leaping");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::pair<int, void (*)()> steps[] = {{1, scaled_convolution}, {2, fourier_quadrature}, {3, fcc_rule},
                                         {4, frequency_solver_2d}, {5, kite_convergence}, {6, sphere_round_trip},
                                         {7, properties}};
  for (auto [id, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
      verdict(id, false, "aborted");
    }
  }
  std::printf("%d of 7 criteria failed (%.0f s)\n", failures, elapsed(start));
  return failures == 0 ? 0 : 1;
}
