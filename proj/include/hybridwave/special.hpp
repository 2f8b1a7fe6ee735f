#pragma once

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>

#include "hybridwave/core.hpp"

// Bessel functions of integer order. J_n for n >= 2 uses Miller's downward
// recurrence normalized by J_0 + 2 sum J_2k = 1; Boost.Math supplies J_0, J_1,
// Y_0, Y_1 and the spherical functions (double precision, no promotion).
// Boost 1.74 cyl_bessel_j(n >= 2, x) loses accuracy near zeros of J_0.
namespace hybridwave::special {

namespace detail {
using policy = boost::math::policies::policy<
    boost::math::policies::promote_double<false>,
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>>;
}

// J_0(x) .. J_nmax(x), x >= 0.
inline rvec besselj_sequence(int nmax, double x) {
  require(nmax >= 0 && x >= 0.0, "besselj_sequence: need nmax >= 0 and x >= 0");
  rvec out(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double top = std::max(static_cast<double>(nmax), x);
  int m = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  m += m & 1;
  double next = 0.0, cur = 1.0, norm = 0.0;
  for (int k = m; k > 0; --k) {
    // cur = J_k, next = J_{k+1} (unnormalized)
    const double prev = 2.0 * k / x * cur - next;
    next = cur;
    cur = prev;
    if (k - 1 <= nmax) out[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      for (int j = k - 1; j <= nmax; ++j) out[static_cast<std::size_t>(j)] *= 1e-250;
    }
  }
  norm += cur;
  for (auto& v : out) v /= norm;
  return out;
}

inline double besselj(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * besselj(-n, x);
  if (x < 0.0) return (n % 2 == 0 ? 1.0 : -1.0) * besselj(n, -x);
  if (n == 0) return boost::math::cyl_bessel_j(0, x, detail::policy());
  if (n == 1) return boost::math::cyl_bessel_j(1, x, detail::policy());
  return besselj_sequence(n, x)[static_cast<std::size_t>(n)];
}

// Y_0(x) .. Y_nmax(x) by upward recurrence, x > 0. Overflows to -inf.
inline rvec bessely_sequence(int nmax, double x) {
  require(nmax >= 0 && x > 0.0, "bessely_sequence: need nmax >= 0 and x > 0");
  rvec out(static_cast<std::size_t>(nmax) + 1);
  out[0] = boost::math::cyl_neumann(0, x, detail::policy());
  if (nmax >= 1) out[1] = boost::math::cyl_neumann(1, x, detail::policy());
  for (int n = 1; n < nmax; ++n) out[n + 1] = 2.0 * n / x * out[n] - out[n - 1];
  return out;
}

inline double bessely(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessely(-n, x);
  return bessely_sequence(n, x)[static_cast<std::size_t>(n)];
}

inline cplx hankel1(int n, double x) { return {besselj(n, x), bessely(n, x)}; }

// d/dx H_n^(1)(x)
inline cplx hankel1_prime(int n, double x) {
  return 0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x));
}

inline double besselj_prime(int n, double x) {
  return 0.5 * (besselj(n - 1, x) - besselj(n + 1, x));
}

inline double sph_besselj(unsigned n, double x) {
  return boost::math::sph_bessel(n, x, detail::policy());
}

inline double sph_bessely(unsigned n, double x) {
  return boost::math::sph_neumann(n, x, detail::policy());
}

inline cplx sph_hankel1(unsigned n, double x) {
  return {sph_besselj(n, x), sph_bessely(n, x)};
}

// j_0(x) .. j_nmax(x), x > 0, by downward recurrence normalized with
// sum (2n+1) j_n^2 = 1.
inline rvec sph_besselj_sequence(int nmax, double x) {
  require(nmax >= 0 && x > 0.0, "sph_besselj_sequence: need nmax >= 0 and x > 0");
  const double top = std::max(static_cast<double>(nmax), x);
  const int m = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  rvec v(static_cast<std::size_t>(m) + 2, 0.0);
  v[static_cast<std::size_t>(m)] = 1.0;
  for (int n = m; n > 0; --n) {
    v[static_cast<std::size_t>(n - 1)] = (2.0 * n + 1.0) / x * v[static_cast<std::size_t>(n)] - v[static_cast<std::size_t>(n + 1)];
    if (std::abs(v[static_cast<std::size_t>(n - 1)]) > 1e100)
      for (int j = n - 1; j <= m; ++j) v[static_cast<std::size_t>(j)] *= 1e-100;
  }
  double norm = 0.0;
  for (int n = m; n >= 0; --n) norm += (2.0 * n + 1.0) * v[static_cast<std::size_t>(n)] * v[static_cast<std::size_t>(n)];
  double scale = 1.0 / std::sqrt(norm);
  const double j0 = std::sin(x) / x;
  const double j1 = x < 1e-3 ? x / 3.0 * (1.0 - x * x / 10.0) : (std::sin(x) / x - std::cos(x)) / x;
  if (std::abs(j0) >= std::abs(j1) ? j0 * v[0] < 0.0 : j1 * v[1] < 0.0) scale = -scale;
  rvec out(v.begin(), v.begin() + nmax + 1);
  for (auto& e : out) e *= scale;
  return out;
}

// y_0(x) .. y_nmax(x), x > 0, by upward recurrence.
inline rvec sph_bessely_sequence(int nmax, double x) {
  require(nmax >= 0 && x > 0.0, "sph_bessely_sequence: need nmax >= 0 and x > 0");
  rvec out(static_cast<std::size_t>(nmax) + 1);
  out[0] = -std::cos(x) / x;
  if (nmax >= 1) out[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n + 1.0) / x * out[n] - out[n - 1];
  return out;
}

inline double legendre_p(int n, double x) {
  return boost::math::legendre_p(n, x, detail::policy());
}

inline constexpr double euler_gamma = 0.57721566490153286061;

}  // namespace hybridwave::special
