#pragma once

#include <algorithm>
#include <cmath>

#include "hybridwave/quadrature.hpp"

namespace oracles {

// int_a^b f(w) e^{-iwt} dw by Gauss-Legendre on panels that are geometrically
// refined toward `a` and short enough to resolve the oscillation.
template <class Fn>
hybridwave::cplx oscillatory_integral(const Fn& f, double a, double b, double t,
                                      bool refine_left = false) {
  using hybridwave::cplx;
  auto g = [&](double w) { return f(w) * std::exp(cplx(0.0, -w * t)); };
  cplx sum = 0.0;
  double lo = a;
  if (refine_left) {
    double d = (b - a) * 1e-40;
    sum += hybridwave::composite_gauss(g, a, a + d, 1, 30);
    while (d < 0.5 * (b - a) && d * std::abs(t) < 1.0) {
      sum += hybridwave::composite_gauss(g, a + d, a + 2.0 * d, 1, 30);
      d *= 2.0;
    }
    lo = a + d;
  }
  const int panels = std::max(8, static_cast<int>((b - lo) * std::abs(t) / 2.0) + 1);
  sum += hybridwave::composite_gauss(g, lo, b, panels, 30);
  return sum;
}

}  // namespace oracles
