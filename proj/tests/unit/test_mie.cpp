#include <gtest/gtest.h>

#include <cmath>

#include "hybridwave/mie.hpp"

using namespace hybridwave;

namespace {

cplx plane2(double omega, const Vec2& p, const Vec2& r) { return std::exp(I * omega * (p[0] * r[0] + p[1] * r[1])); }

cplx plane3(double omega, const Vec3& p, const Vec3& r) {
  return std::exp(I * omega * (p[0] * r[0] + p[1] * r[1] + p[2] * r[2]));
}

}  // namespace

TEST(Mie, DiscSoundSoft) {
  const double a = 1.3;
  const Vec2 p{std::cos(0.4), std::sin(0.4)};
  for (double omega : {0.3, 2.404826, 5.0, 12.0, 30.0}) {
    std::vector<Vec2> pts;
    for (int j = 0; j < 17; ++j) {
      const double th = two_pi * j / 17.0;
      pts.push_back({a * std::cos(th), a * std::sin(th)});
    }
    const cvec u = disc_scatter(a, omega, p, pts);
    for (std::size_t j = 0; j < pts.size(); ++j)
      EXPECT_LT(std::abs(u[j] + plane2(omega, p, pts[j])), 1e-12) << omega << " " << j;
  }
}

TEST(Mie, SphereSoundSoft) {
  const double a = 1.6;
  const Vec3 p{0.0, 0.6, 0.8};
  for (double omega : {0.3, 3.0, 6.5, 20.0}) {
    std::vector<Vec3> pts;
    for (int j = 0; j < 11; ++j) {
      const double th = pi * (j + 0.5) / 11.0, ph = 1.7 * j;
      pts.push_back({a * std::sin(th) * std::cos(ph), a * std::sin(th) * std::sin(ph), a * std::cos(th)});
    }
    const cvec u = sphere_scatter(a, omega, p, pts);
    for (std::size_t j = 0; j < pts.size(); ++j)
      EXPECT_LT(std::abs(u[j] + plane3(omega, p, pts[j])), 1e-12) << omega << " " << j;
  }
}

TEST(Mie, DiscReferenceValues) {
  const Vec2 p{1.0, 0.0};
  const cvec u5 = disc_scatter(1.0, 5.0, p, {{2.0, 0.0}});
  EXPECT_NEAR(u5[0].real(), 0.948743651632037237, 1e-13);
  EXPECT_NEAR(u5[0].imag(), 0.491034276216126707, 1e-13);
  const cvec u12 = disc_scatter(1.0, 12.0, p, {{2.0, 0.0}});
  EXPECT_NEAR(u12[0].real(), -0.495514265800277646, 1e-13);
  EXPECT_NEAR(u12[0].imag(), 0.904951539776493391, 1e-13);
}

TEST(Mie, SphereReferenceValue) {
  const cvec u = sphere_scatter(1.6, 6.5, {1.0, 0.0, 0.0}, {{-1.8, 0.0, 0.0}});
  EXPECT_NEAR(u[0].real(), 0.757427759528509066, 1e-13);
  EXPECT_NEAR(u[0].imag(), 0.268122085471460286, 1e-13);
}

TEST(Mie, DiscLowFrequencyTotalVanishesLikeInverseLog) {
  const Vec2 p{1.0, 0.0};
  const Vec2 r{2.0, 1.0};
  double prev = 1.0;
  for (double omega : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const cplx total = disc_scatter(1.0, omega, p, {r})[0] + plane2(omega, p, r);
    const double scaled = std::abs(total) * std::abs(std::log(omega));
    // log(|r|/a) is the leading coefficient
    EXPECT_NEAR(scaled, std::log(std::hypot(r[0], r[1])), 0.25 * std::log(std::hypot(r[0], r[1])));
    EXPECT_LT(std::abs(total), prev);
    prev = std::abs(total);
  }
  EXPECT_EQ(disc_scatter(1.0, 0.0, p, {r})[0], cplx(-1.0));
}

TEST(Mie, SphereStaticLimit) {
  const Vec3 p{0.0, 0.0, 1.0};
  const Vec3 r{0.0, 2.0, 1.0};
  const double rr = std::sqrt(5.0);
  EXPECT_NEAR(std::abs(sphere_scatter(1.0, 0.0, p, {r})[0] + 1.0 / rr), 0.0, 1e-15);
  const cvec small = sphere_scatter(1.0, 1e-6, p, {r});
  EXPECT_NEAR(std::abs(small[0] + 1.0 / rr), 0.0, 1e-5);
}

TEST(Mie, NegativeFrequencyConjugates) {
  const Vec3 p{1.0, 0.0, 0.0};
  const std::vector<Vec3> pts{{-1.8, 0.0, 0.0}, {2.5, 1.0, -0.3}};
  const cvec up = sphere_scatter(1.6, 6.5, p, pts);
  const cvec um = sphere_scatter(1.6, -6.5, p, pts);
  for (std::size_t j = 0; j < pts.size(); ++j) EXPECT_EQ(um[j], std::conj(up[j]));
  const cvec dp = disc_scatter(1.0, 4.0, {0.0, 1.0}, {{0.5, 2.0}});
  const cvec dm = disc_scatter(1.0, -4.0, {0.0, 1.0}, {{0.5, 2.0}});
  EXPECT_EQ(dm[0], std::conj(dp[0]));
}

TEST(Mie, TruncationIndependence) {
  for (double omega : {1.0, 6.5, 25.0}) {
    const double kr = omega * 3.0;
    const int n0 = static_cast<int>(kr + 30.0);
    const cvec a = disc_scatter(1.0, omega, {1.0, 0.0}, {{0.0, 3.0}}, 1.0, n0);
    const cvec b = disc_scatter(1.0, omega, {1.0, 0.0}, {{0.0, 3.0}}, 1.0, 2 * n0);
    EXPECT_LT(std::abs(a[0] - b[0]), 1e-13) << omega;
    const cvec s = sphere_scatter(1.0, omega, {1.0, 0.0, 0.0}, {{0.0, 3.0, 0.0}}, 1.0, n0);
    const cvec t = sphere_scatter(1.0, omega, {1.0, 0.0, 0.0}, {{0.0, 3.0, 0.0}}, 1.0, 2 * n0);
    EXPECT_LT(std::abs(s[0] - t[0]), 1e-13) << omega;
  }
}

TEST(Mie, InteriorPointThrows) {
  EXPECT_THROW(disc_scatter(1.0, 2.0, {1.0, 0.0}, {{0.5, 0.5}}), DomainError);
  EXPECT_THROW(sphere_scatter(1.0, 2.0, {1.0, 0.0, 0.0}, {{0.1, 0.2, 0.3}}), DomainError);
  EXPECT_THROW(disc_scatter(1.0, 2.0, {2.0, 0.0}, {{3.0, 0.0}}), InvalidArgument);
}

TEST(Mie, CylindricalWronskian) {
  for (double x : {0.5, 2.404826, 10.0, 30.0, 65.0}) {
    for (int n = 0; n < 60; ++n) {
      const double jn = special::besselj(n, x), jn1 = special::besselj(n + 1, x);
      const double yn = special::bessely(n, x), yn1 = special::bessely(n + 1, x);
      if (!std::isfinite(yn1) || std::abs(yn1) > 1e250) break;
      const double w = jn1 * yn - jn * yn1;
      const double ref = 2.0 / (pi * x);
      // cancellation scale is |J_n Y_{n+1}|
      const double scale = std::max(std::abs(jn * yn1), std::abs(jn1 * yn)) / ref;
      EXPECT_LT(std::abs(w - ref) / ref, 1e-13 * std::max(1.0, scale)) << n << " " << x;
    }
  }
}

TEST(Mie, SphericalWronskian) {
  for (double x : {0.5, 3.0, 10.4, 30.0}) {
    for (unsigned n = 1; n < 50; ++n) {
      const double jn = special::sph_besselj(n, x), jm = special::sph_besselj(n - 1, x);
      const double yn = special::sph_bessely(n, x), ym = special::sph_bessely(n - 1, x);
      if (!std::isfinite(yn) || std::abs(yn) > 1e250) break;
      const double w = jn * ym - jm * yn;
      const double ref = 1.0 / (x * x);
      const double scale = std::max(std::abs(jn * ym), std::abs(jm * yn)) / ref;
      EXPECT_LT(std::abs(w - ref) / ref, 1e-13 * std::max(1.0, scale)) << n << " " << x;
    }
  }
}

TEST(Mie, TabulatedBesselValues) {
  EXPECT_NEAR(special::besselj(0, 2.404825557695773), 0.0, 1e-15);
  EXPECT_NEAR(special::besselj(1, 1.0), 0.44005058574493352, 1e-16);
  EXPECT_NEAR(special::bessely(0, 1.0), 0.088256964215676958, 1e-16);
  EXPECT_NEAR(special::bessely(1, 2.0), -0.10703243154093755, 1e-16);
  EXPECT_NEAR(special::besselj(5, 10.0), -0.23406152818679364, 1e-15);
  EXPECT_NEAR(special::sph_besselj(0, 1.0), std::sin(1.0), 1e-16);
  EXPECT_NEAR(special::sph_bessely(1, 1.0), -std::cos(1.0) - std::sin(1.0), 1e-15);
  EXPECT_NEAR(special::sph_besselj(3, 2.0), 0.060722097662874806, 1e-15);
  // second zero of J_0
  EXPECT_NEAR(special::besselj(6, 5.520078110286311), 0.18913790473884, 1e-14);
  EXPECT_NEAR(special::besselj(7, 5.520078110286311), 0.0881464684159767, 1e-14);
}

TEST(Mie, BesselSequenceMatchesScalar) {
  for (double x : {0.01, 3.0, 40.0, 150.0}) {
    const rvec j = special::besselj_sequence(200, x);
    const rvec y = special::bessely_sequence(20, x);
    EXPECT_NEAR(j[0], special::besselj(0, x), 2e-15);
    EXPECT_NEAR(j[1], special::besselj(1, x), 2e-15);
    EXPECT_GE(j[200], 0.0);
    EXPECT_NEAR(y[20], special::bessely(20, x), 1e-15 * std::abs(y[20]));
  }
  EXPECT_EQ(special::besselj_sequence(3, 0.0)[0], 1.0);
  EXPECT_EQ(special::besselj_sequence(3, 0.0)[2], 0.0);
}

TEST(Mie, SphericalSequencesMatchScalar) {
  for (double x : {1e-4, 0.3, 3.0, 40.0, 150.0}) {
    const rvec j = special::sph_besselj_sequence(60, x);
    const rvec y = special::sph_bessely_sequence(10, x);
    for (unsigned n : {0u, 1u, 5u, 30u}) {
      const double ref = special::sph_besselj(n, x);
      EXPECT_NEAR(j[n], ref, 1e-14 * std::max(std::abs(ref), 1e-300) + 1e-300) << n << " " << x;
    }
    EXPECT_NEAR(y[10], special::sph_bessely(10, x), 1e-13 * std::abs(y[10]));
  }
}
