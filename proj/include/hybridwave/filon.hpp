#pragma once

#include <cmath>
#include <vector>

#include "hybridwave/core.hpp"
#include "hybridwave/quadrature.hpp"

namespace hybridwave {

// mu_j = omega_c (j / count)^q, j = 1..count.
struct GradedMesh {
  double omega_c = 1.0;
  int count = 4;
  double q = 9.1;
  rvec nodes;
};

inline GradedMesh build_graded_mesh(double omega_c, int count, double q) {
  require(omega_c > 0.0, "graded mesh: omega_c must be positive");
  require(count >= 2, "graded mesh: need at least two subintervals");
  require(q >= 1.0, "graded mesh: grading exponent must be >= 1");
  GradedMesh m{omega_c, count, q, {}};
  for (int j = 1; j <= count; ++j)
    m.nodes.push_back(j == count ? omega_c : omega_c * std::pow(double(j) / count, q));
  return m;
}

// Clenshaw-Curtis points x_i = -cos(pi i/(n-1)), ascending on [-1, 1].
inline rvec clenshaw_curtis_points(int n) {
  rvec x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -std::cos(pi * i / (n - 1));
  x.front() = -1.0;
  x.back() = 1.0;
  return x;
}

// Moments I_k(s) = int_{-1}^{1} T_k(x) e^{isx} dx, k = 0..kmax. Gauss-Legendre
// for |s| <= 2(kmax+1); beyond, the forward three-term recurrence, which is
// stable while k < |s|.
inline cvec chebyshev_moments(int kmax, double s) {
  cvec I(static_cast<std::size_t>(kmax + 1));
  if (std::abs(s) <= 2.0 * (kmax + 1)) {
    const auto& gl = cached_gauss_legendre(64);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double x = gl.nodes[i];
      const cplx e = gl.weights[i] * std::exp(cplx(0.0, s * x));
      double tprev = 1.0, tk = 1.0;
      for (int k = 0; k <= kmax; ++k) {
        if (k == 1) {
          tk = x;
        } else if (k >= 2) {
          const double next = 2.0 * x * tk - tprev;
          tprev = tk;
          tk = next;
        }
        I[static_cast<std::size_t>(k)] += tk * e;
      }
    }
    return I;
  }
  const double sn = std::sin(s), cs = std::cos(s);
  const cplx ep = std::exp(cplx(0.0, s)), em = std::exp(cplx(0.0, -s));
  const cplx is = cplx(0.0, s);
  I[0] = 2.0 * sn / s;
  if (kmax >= 1) I[1] = cplx(0.0, 2.0) * (sn - s * cs) / (s * s);
  if (kmax >= 2) I[2] = (ep - em - 4.0 * I[1]) / is;
  for (int k = 2; k < kmax; ++k) {
    // D_j = e^{is} - (-1)^j e^{-is}; D_{k+1} = D_{k-1}
    const cplx D = ep - ((k + 1) % 2 ? -1.0 : 1.0) * em;
    const double kp = k + 1.0, km = k - 1.0;
    I[static_cast<std::size_t>(k + 1)] =
        kp / is * (D / kp - D / km - 2.0 * I[static_cast<std::size_t>(k)]) +
        kp / km * I[static_cast<std::size_t>(k - 1)];
  }
  return I;
}

// int_lo^hi F(w) e^{-iwt} dw with F replaced by its Chebyshev interpolant;
// `values` are F at lo + (hi-lo)(1 + x_i)/2 for the ascending CC points x_i.
inline cplx filon_interval(const cvec& values, double lo, double hi, double t) {
  const int n = static_cast<int>(values.size());
  require(n >= 2, "filon_interval: need at least two nodes");
  require(hi > lo, "filon_interval: degenerate interval");
  const int N = n - 1;
  // a_k = (2/N) sum'' f(cos(pi i/N)) cos(pi i k/N); ascending x_i = cos(pi (N-i)/N)
  cvec a(static_cast<std::size_t>(n));
  for (int k = 0; k <= N; ++k) {
    cplx s = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      s += w * values[static_cast<std::size_t>(N - i)] * std::cos(pi * i * k / N);
    }
    a[static_cast<std::size_t>(k)] = 2.0 * s / double(N);
  }
  a.front() *= 0.5;
  a.back() *= 0.5;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const cvec mom = chebyshev_moments(N, -half * t);
  cplx sum = 0.0;
  for (int k = 0; k <= N; ++k) sum += a[static_cast<std::size_t>(k)] * mom[static_cast<std::size_t>(k)];
  return half * std::exp(cplx(0.0, -mid * t)) * sum;
}

// Composite rule on the graded mesh: points per subinterval, subintervals
// [mu_{j-1}, mu_j] for j = 2..count ((0, mu_1] is dropped).
class FCCRule {
 public:
  FCCRule(GradedMesh mesh, int points) : mesh_(std::move(mesh)), points_(points) {
    require(points >= 2, "FCC rule: need at least two points per subinterval");
    require(mesh_.q > points + 1.0, "FCC rule: grading exponent q must exceed points + 1");
    const rvec x = clenshaw_curtis_points(points);
    for (int j = 1; j < mesh_.count; ++j) {
      const double lo = mesh_.nodes[static_cast<std::size_t>(j - 1)];
      const double hi = mesh_.nodes[static_cast<std::size_t>(j)];
      for (double xi : x) nodes_.push_back(lo + 0.5 * (hi - lo) * (1.0 + xi));
    }
  }

  const GradedMesh& mesh() const { return mesh_; }
  int points() const { return points_; }
  int intervals() const { return mesh_.count - 1; }
  // Positive frequencies, `points` per subinterval in ascending order.
  const rvec& nodes() const { return nodes_; }
  // Signed node count |F^sing| = 2 (count - 1) points.
  std::size_t signed_size() const { return 2 * nodes_.size(); }

  // `values` are F at nodes(); returns int_{mu_1}^{omega_c} F(w) e^{-iwt} dw.
  cplx integrate(const cvec& values, double t) const {
    require(values.size() == nodes_.size(), "FCC rule: value count does not match nodes");
    cplx s = 0.0;
    const auto n = static_cast<std::size_t>(points_);
    for (int j = 0; j < intervals(); ++j) {
      cvec v(values.begin() + static_cast<long>(j * n), values.begin() + static_cast<long>((j + 1) * n));
      s += filon_interval(v, mesh_.nodes[static_cast<std::size_t>(j)], mesh_.nodes[static_cast<std::size_t>(j + 1)], t);
    }
    return s;
  }

 private:
  GradedMesh mesh_;
  int points_;
  rvec nodes_;
};

template <class Fn>
cvec filon_integrate(const Fn& F, const FCCRule& rule, const rvec& times) {
  cvec values;
  values.reserve(rule.nodes().size());
  for (double w : rule.nodes()) values.push_back(F(w));
  cvec out;
  out.reserve(times.size());
  for (double t : times) out.push_back(rule.integrate(values, t));
  return out;
}

}  // namespace hybridwave
