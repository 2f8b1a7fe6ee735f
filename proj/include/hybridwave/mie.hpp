#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hybridwave/core.hpp"
#include "hybridwave/special.hpp"

// Series solutions for plane waves e^{i kappa p.r} scattered by a sound-soft
// disc (2D) or sphere (3D) of radius a centered at the origin. Returned values
// are the scattered field only.
namespace hybridwave {

namespace detail {

// Sums terms produced by term(n) until they stay below tol * |sum| for three
// consecutive orders past n_min.
template <class Term>
cplx sum_series(const Term& term, int n_min, int n_cap) {
  cplx sum = 0.0;
  int quiet = 0;
  for (int n = 0; n <= n_cap; ++n) {
    const cplx t = term(n);
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) break;
    sum += t;
    if (n > n_min && std::abs(t) <= 1e-17 * std::abs(sum)) {
      if (++quiet == 3) break;
    } else {
      quiet = 0;
    }
  }
  return sum;
}

inline cplx i_pow(int n) {
  switch (n % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace detail

// min_order forces at least that many series terms (truncation checks).
inline cvec disc_scatter(double a, double omega, const Vec2& p, const std::vector<Vec2>& points,
                         double c = 1.0, int min_order = 0) {
  require(a > 0.0 && c > 0.0, "disc_scatter: radius and wave speed must be positive");
  require(std::abs(std::hypot(p[0], p[1]) - 1.0) < 1e-12, "disc_scatter: direction must be a unit vector");
  cvec out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = std::hypot(points[i][0], points[i][1]);
    if (r < a * (1.0 - 1e-14)) throw DomainError("disc_scatter: point inside the disc");
  }
  if (omega == 0.0) {
    for (auto& v : out) v = -1.0;
    return out;
  }
  if (omega < 0.0) {
    out = disc_scatter(a, -omega, p, points, c, min_order);
    for (auto& v : out) v = std::conj(v);
    return out;
  }
  const double k = omega / c, ka = k * a;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i][0], y = points[i][1];
    const double r = std::hypot(x, y);
    const double cos_t = r > 0.0 ? (x * p[0] + y * p[1]) / r : 1.0;
    const double theta = std::acos(std::clamp(cos_t, -1.0, 1.0));
    const double kr = k * r;
    const int n_min = std::max(min_order, static_cast<int>(kr + 10.0));
    const int n_cap = std::max(min_order, static_cast<int>(kr + 200.0));
    const rvec ja = special::besselj_sequence(n_cap, ka), ya = special::bessely_sequence(n_cap, ka);
    const rvec jr = special::besselj_sequence(n_cap, kr), yr = special::bessely_sequence(n_cap, kr);
    auto term = [&](int n) -> cplx {
      const double eps = n == 0 ? 1.0 : 2.0;
      const double jn = ja[n];
      if (jn == 0.0 && n > ka) return 0.0;
      return eps * detail::i_pow(n) * jn / cplx(jn, ya[n]) * cplx(jr[n], yr[n]) * std::cos(n * theta);
    };
    out[i] = -detail::sum_series(term, n_min, n_cap);
  }
  return out;
}

inline cvec sphere_scatter(double a, double omega, const Vec3& p, const std::vector<Vec3>& points,
                           double c = 1.0, int min_order = 0) {
  require(a > 0.0 && c > 0.0, "sphere_scatter: radius and wave speed must be positive");
  require(std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0) < 1e-12,
          "sphere_scatter: direction must be a unit vector");
  cvec out(points.size());
  std::vector<double> radii(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& q = points[i];
    radii[i] = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
    if (radii[i] < a * (1.0 - 1e-14)) throw DomainError("sphere_scatter: point inside the sphere");
  }
  if (omega == 0.0) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = -a / radii[i];
    return out;
  }
  if (omega < 0.0) {
    out = sphere_scatter(a, -omega, p, points, c, min_order);
    for (auto& v : out) v = std::conj(v);
    return out;
  }
  const double k = omega / c, ka = k * a;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& q = points[i];
    const double r = radii[i], kr = k * r;
    const double x = (q[0] * p[0] + q[1] * p[1] + q[2] * p[2]) / r;
    const int n_min = std::max(min_order, static_cast<int>(kr + 10.0));
    const int n_cap = std::max(min_order, static_cast<int>(kr + 200.0));
    const rvec ja = special::sph_besselj_sequence(n_cap, ka), ya = special::sph_bessely_sequence(n_cap, ka);
    const rvec jr = special::sph_besselj_sequence(n_cap, kr), yr = special::sph_bessely_sequence(n_cap, kr);
    double p_prev = 1.0, p_cur = x;
    auto term = [&](int n) -> cplx {
      double pn;
      if (n == 0) {
        pn = 1.0;
      } else if (n == 1) {
        pn = x;
      } else {
        pn = ((2.0 * n - 1.0) * x * p_cur - (n - 1.0) * p_prev) / n;
        p_prev = p_cur;
        p_cur = pn;
      }
      const double jn = ja[n];
      if (jn == 0.0 && n > ka) return 0.0;
      return (2.0 * n + 1.0) * detail::i_pow(n) * jn / cplx(jn, ya[n]) * cplx(jr[n], yr[n]) * pn;
    };
    out[i] = -detail::sum_series(term, n_min, n_cap);
  }
  return out;
}

}  // namespace hybridwave
