#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "hybridwave/core.hpp"
#include "hybridwave/parallel.hpp"
#include "hybridwave/special.hpp"

// Sound-soft scattering in 2D: direct combined field integral equation
//   psi/2 + K*psi - i eta S psi = dB/dn - i eta B
// discretized by the Nystrom method with Kress log-splitting on a smooth
// closed curve. The scattered field is U = S psi evaluated off the curve.
namespace hybridwave {

// Closed curve x(t) = sum_k ax[k] cos(kt) + bx[k] sin(kt), likewise y.
// Index 0 of the cosine arrays is the constant term.
struct TrigCurve {
  std::string name = "custom";
  rvec ax, bx, ay, by;

  Vec2 point(double t) const { return eval(t, 0); }
  Vec2 d1(double t) const { return eval(t, 1); }
  Vec2 d2(double t) const { return eval(t, 2); }

  void validate() const {
    require(!ax.empty() || !bx.empty() || !ay.empty() || !by.empty(), "curve: no coefficients");
    for (int j = 0; j < 256; ++j) {
      const Vec2 v = d1(two_pi * j / 256.0);
      require(std::hypot(v[0], v[1]) > 1e-10, "curve: parameterization is singular");
    }
  }

 private:
  static double series(const rvec& c, const rvec& s, double t, int order) {
    double v = 0.0;
    for (std::size_t k = 0; k < std::max(c.size(), s.size()); ++k) {
      const double kk = static_cast<double>(k);
      const double ck = k < c.size() ? c[k] : 0.0, sk = k < s.size() ? s[k] : 0.0;
      const double cs = std::cos(kk * t), sn = std::sin(kk * t);
      switch (order) {
        case 0: v += ck * cs + sk * sn; break;
        case 1: v += kk * (-ck * sn + sk * cs); break;
        default: v += -kk * kk * (ck * cs + sk * sn); break;
      }
    }
    return v;
  }
  Vec2 eval(double t, int order) const { return {series(ax, bx, t, order), series(ay, by, t, order)}; }
};

// (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
inline TrigCurve kite_curve() {
  TrigCurve c;
  c.name = "kite";
  c.ax = {-0.65, 1.0, 0.65};
  c.by = {0.0, 1.5};
  return c;
}

inline TrigCurve circle_curve(double radius = 1.0, Vec2 center = {0.0, 0.0}) {
  require(radius > 0.0, "circle_curve: radius must be positive");
  TrigCurve c;
  c.name = "circle";
  c.ax = {center[0], radius};
  c.ay = {center[1]};
  c.by = {0.0, radius};
  return c;
}

// Curve sampled at t_j = 2 pi j / N.
struct Curve {
  TrigCurve shape;
  int n = 0;
  rvec t, speed;
  std::vector<Vec2> x, dx, ddx, normal;

  int size() const { return n; }
};

inline Curve discretize(const TrigCurve& shape, int n_nodes) {
  require(n_nodes >= 8 && n_nodes % 2 == 0, "discretize: node count must be even and >= 8");
  shape.validate();
  Curve c;
  c.shape = shape;
  c.n = n_nodes;
  c.t.resize(n_nodes);
  c.speed.resize(n_nodes);
  c.x.resize(n_nodes);
  c.dx.resize(n_nodes);
  c.ddx.resize(n_nodes);
  c.normal.resize(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double t = two_pi * j / n_nodes;
    c.t[j] = t;
    c.x[j] = shape.point(t);
    c.dx[j] = shape.d1(t);
    c.ddx[j] = shape.d2(t);
    c.speed[j] = std::hypot(c.dx[j][0], c.dx[j][1]);
    c.normal[j] = {c.dx[j][1] / c.speed[j], -c.dx[j][0] / c.speed[j]};
  }
  return c;
}

struct BoundaryDensity {
  double omega = 0.0;
  cvec values;
};

enum class SolveMode { lu, gmres };

struct CFIESystem {
  double omega = 0.0, eta = 0.0, c = 1.0;
  std::shared_ptr<const Curve> curve;
  Eigen::MatrixXcd matrix;
  std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;

  double kappa() const { return omega / c; }
  int size() const { return static_cast<int>(matrix.rows()); }
};

inline double default_coupling(double omega, double c = 1.0) { return std::max(omega / c, 1.0); }

namespace detail {

// Weights of the log-singular rule: int ln(4 sin^2((t_i - s)/2)) f(s) ds
// ~ sum_j R[|i-j|] f(t_j), with 2n nodes.
inline rvec kress_weights(int n_nodes) {
  const int n = n_nodes / 2;
  rvec r(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * pi * k / n) / m;
    r[k] = -two_pi / n * s - pi / (static_cast<double>(n) * n) * (k % 2 == 0 ? 1.0 : -1.0);
  }
  return r;
}

}  // namespace detail

inline CFIESystem assemble_cfie(const Curve& curve, double omega, double eta, double c = 1.0,
                                bool factorize = true) {
  require(omega > 0.0, "assemble_cfie: frequency must be positive");
  require(c > 0.0, "assemble_cfie: wave speed must be positive");
  const int N = curve.n;
  const double kappa = omega / c;
  const rvec R = detail::kress_weights(N);
  const double w = two_pi / N;
  const cplx ieta = I * eta;
  Eigen::MatrixXcd A(N, N);
  // J0, H0 and H1 at kappa |x_i - x_j| are symmetric in (i, j); rows are
  // filled in parallel with each row computing its own upper part.
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    const Vec2 xi = curve.x[i], ni = curve.normal[i];
    for (int j = i; j < N; ++j) {
      const int k = j - i;
      if (j == i) {
        const double sp = curve.speed[i];
        const Vec2 d1 = curve.dx[i], d2 = curve.ddx[i];
        const double l2 = (d2[0] * d1[1] - d2[1] * d1[0]) / (2.0 * two_pi * sp * sp * sp);
        const cplx m2 = 0.25 * I - special::euler_gamma / two_pi - std::log(kappa * sp / 2.0) / two_pi;
        const double m1 = -1.0 / (2.0 * two_pi);
        A(i, i) = 0.5 + sp * ((-ieta * m1) * R[0] + (l2 - ieta * m2) * w);
        continue;
      }
      const Vec2 xj = curve.x[j], nj = curve.normal[j];
      const double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
      const double rr = std::hypot(dx, dy);
      const double z = kappa * rr;
      const double j0 = special::besselj(0, z), j1 = special::besselj(1, z);
      const cplx h0(j0, special::bessely(0, z)), h1(j1, special::bessely(1, z));
      const double lg = std::log(4.0 * std::pow(std::sin(pi * k / N), 2));
      const double m1 = -j0 / (2.0 * two_pi);
      const cplx m = 0.25 * I * h0;
      const cplx m2 = m - m1 * lg;
      // target i, source j
      const double proj_i = (ni[0] * dx + ni[1] * dy) / rr;
      const double l1_ij = kappa * j1 * proj_i / (2.0 * two_pi);
      const cplx l_ij = -0.25 * I * kappa * h1 * proj_i;
      // target j, source i
      const double proj_j = -(nj[0] * dx + nj[1] * dy) / rr;
      const double l1_ji = kappa * j1 * proj_j / (2.0 * two_pi);
      const cplx l_ji = -0.25 * I * kappa * h1 * proj_j;
      const double rk = R[k];
      A(i, j) = curve.speed[j] * ((l1_ij - ieta * m1) * rk + (l_ij - l1_ij * lg - ieta * m2) * w);
      A(j, i) = curve.speed[i] * ((l1_ji - ieta * m1) * rk + (l_ji - l1_ji * lg - ieta * m2) * w);
    }
  });
  CFIESystem sys;
  sys.omega = omega;
  sys.eta = eta;
  sys.c = c;
  sys.curve = std::make_shared<const Curve>(curve);
  sys.matrix = std::move(A);
  if (factorize) sys.lu = std::make_shared<const Eigen::PartialPivLU<Eigen::MatrixXcd>>(sys.matrix);
  return sys;
}

inline CFIESystem assemble_cfie(const Curve& curve, double omega) {
  return assemble_cfie(curve, omega, default_coupling(omega));
}

// (i kappa p.n - i eta) e^{i kappa p.x} at the nodes.
inline cvec plane_wave_rhs(const Curve& curve, double omega, const Vec2& p, double eta, double c = 1.0) {
  require(std::abs(std::hypot(p[0], p[1]) - 1.0) < 1e-12, "plane_wave_rhs: direction must be a unit vector");
  const double kappa = omega / c;
  cvec out(curve.n);
  for (int j = 0; j < curve.n; ++j) {
    const double pn = p[0] * curve.normal[j][0] + p[1] * curve.normal[j][1];
    const double px = p[0] * curve.x[j][0] + p[1] * curve.x[j][1];
    out[j] = (I * kappa * pn - I * eta) * std::exp(I * kappa * px);
  }
  return out;
}

struct SolveOptions {
  SolveMode mode = SolveMode::lu;
  double tolerance = 1e-8;
  int max_iterations = 500;
  int restart = 100;
};

inline BoundaryDensity solve_density(const CFIESystem& sys, const cvec& rhs, const SolveOptions& opt = {}) {
  require(static_cast<int>(rhs.size()) == sys.size(), "solve_density: rhs size does not match the system");
  Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXcd x;
  if (opt.mode == SolveMode::lu) {
    if (sys.lu) {
      x = sys.lu->solve(b);
    } else {
      x = sys.matrix.partialPivLu().solve(b);
    }
  } else {
    Eigen::GMRES<Eigen::MatrixXcd, Eigen::IdentityPreconditioner> gmres;
    gmres.setTolerance(opt.tolerance);
    gmres.setMaxIterations(opt.max_iterations);
    gmres.set_restart(opt.restart);
    gmres.compute(sys.matrix);
    x = gmres.solve(b);
    if (b.norm() > 0.0 && gmres.info() != Eigen::Success) {
      throw SolverError("solve_density: GMRES did not converge", static_cast<int>(gmres.iterations()),
                        gmres.error());
    }
    if (b.norm() == 0.0) x.setZero(b.size());
  }
  BoundaryDensity d;
  d.omega = sys.omega;
  d.values.assign(x.data(), x.data() + x.size());
  return d;
}

// Winding number of the node polygon around p.
inline double winding_number(const Curve& curve, const Vec2& p) {
  double total = 0.0;
  for (int j = 0; j < curve.n; ++j) {
    const Vec2& a = curve.x[j];
    const Vec2& b = curve.x[(j + 1) % curve.n];
    const double ax = a[0] - p[0], ay = a[1] - p[1], bx = b[0] - p[0], by = b[1] - p[1];
    total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  }
  return total / two_pi;
}

inline cvec eval_potential(const Curve& curve, const BoundaryDensity& density, const std::vector<Vec2>& points,
                           double c = 1.0) {
  require(static_cast<int>(density.values.size()) == curve.n, "eval_potential: density size does not match curve");
  require(density.omega > 0.0, "eval_potential: frequency must be positive");
  double scale = 0.0;
  for (const auto& x : curve.x) scale = std::max(scale, std::hypot(x[0], x[1]));
  for (const auto& p : points) {
    double dmin = INFINITY;
    for (const auto& x : curve.x) dmin = std::min(dmin, std::hypot(p[0] - x[0], p[1] - x[1]));
    if (dmin < 1e-12 * std::max(1.0, scale) || std::abs(winding_number(curve, p)) > 0.5)
      throw DomainError("eval_potential: point on or inside the boundary");
  }
  const double kappa = density.omega / c;
  const double w = two_pi / curve.n;
  cvec out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cplx s = 0.0;
    for (int j = 0; j < curve.n; ++j) {
      const double r = std::hypot(points[i][0] - curve.x[j][0], points[i][1] - curve.x[j][1]);
      s += special::hankel1(0, kappa * r) * density.values[j] * curve.speed[j];
    }
    out[i] = 0.25 * I * w * s;
  }
  return out;
}

// Scattered field of the plane wave e^{i kappa p.x} with U = e^{i kappa p.x}
// on the curve; convenience wrapper around assemble/solve/evaluate.
inline cvec solve_plane_wave(const Curve& curve, double omega, const Vec2& p, const std::vector<Vec2>& points,
                             double c = 1.0, const SolveOptions& opt = {}) {
  const double eta = default_coupling(omega, c);
  const CFIESystem sys = assemble_cfie(curve, omega, eta, c, opt.mode == SolveMode::lu);
  const BoundaryDensity d = solve_density(sys, plane_wave_rhs(curve, omega, p, eta, c), opt);
  return eval_potential(curve, d, points, c);
}

}  // namespace hybridwave
