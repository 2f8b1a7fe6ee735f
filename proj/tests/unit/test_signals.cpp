#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hybridwave/signals.hpp"

using namespace hybridwave;

TEST(Partition, CentersForThirtySeconds) {
  auto p = build_partition(30.0, 10.0);
  ASSERT_EQ(p.K(), 3);
  EXPECT_DOUBLE_EQ(p.centers[0], 0.0);
  EXPECT_DOUBLE_EQ(p.centers[1], 15.0);
  EXPECT_DOUBLE_EQ(p.centers[2], 30.0);
}

TEST(Partition, ShortSignalNeedsOneWindow) {
  auto p = build_partition(2.5, 10.0);
  ASSERT_EQ(p.K(), 1);
  EXPECT_EQ(p.centers[0], 0.0);
}

TEST(Partition, LongSignal) {
  auto p = build_partition(180.0, 10.0);
  ASSERT_EQ(p.K(), 13);
  EXPECT_DOUBLE_EQ(p.centers.back(), 180.0);
}

TEST(Partition, RejectsNonPositive) {
  EXPECT_THROW(build_partition(0.0, 10.0), InvalidArgument);
  EXPECT_THROW(build_partition(10.0, -1.0), InvalidArgument);
}

TEST(Window, BranchValues) {
  auto p = build_partition(30.0, 10.0);
  EXPECT_EQ(window_value(p, 0, 0.0), 1.0);
  EXPECT_EQ(window_value(p, 0, 10.0), 0.0);
  EXPECT_NEAR(window_value(p, 0, 7.5), std::exp(-4.0 * std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(window_value(p, 0, 7.5), 0.58196, 1e-5);
  EXPECT_EQ(window_value(p, 1, 4.999), 0.0);
  EXPECT_THROW(window_value(p, 3, 0.0), std::out_of_range);
  EXPECT_THROW(window_value(p, -1, 0.0), std::out_of_range);
}

TEST(Window, EtaEndpoints) {
  EXPECT_EQ(eta(0.0), 1.0);
  EXPECT_EQ(eta(1.0), 0.0);
  EXPECT_NEAR(eta(1e-300), 1.0, 1e-15);
  EXPECT_NEAR(eta(1.0 - 1e-16), 0.0, 1e-15);
}

TEST(Window, PartitionOfUnityRandom) {
  auto p = build_partition(180.0, 10.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 180.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = u(rng);
    double s = 0.0;
    for (int k = 0; k < p.K(); ++k) s += window_value(p, k, t);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  EXPECT_LE(worst, 1e-14);
}

TEST(Window, SupportIsExact) {
  auto p = build_partition(60.0, 10.0);
  for (int k = 0; k < p.K(); ++k)
    for (double d : {10.0 + 1e-12, 11.0, 25.0})
      for (double sgn : {-1.0, 1.0}) EXPECT_EQ(window_value(p, k, p.centers[k] + sgn * d), 0.0);
}

TEST(Window, SmoothAcrossBranchPoints) {
  const double H = 10.0, h = 1e-5;
  auto w = [&](double t) { return window_shape(t, H); };
  auto d1 = [&](double t) { return (w(t + h) - w(t - h)) / (2 * h); };
  auto d2 = [&](double t) { return (w(t + h) - 2 * w(t) + w(t - h)) / (h * h); };
  for (double b : {-H, -H / 2, H / 2, H}) {
    const double e = 1e-4;
    EXPECT_NEAR(w(b - e), w(b + e), 1e-6) << b;
    EXPECT_NEAR(d1(b - e), d1(b + e), 1e-6) << b;
    EXPECT_NEAR(d2(b - e), d2(b + e), 1e-6) << b;
  }
}

TEST(Windowed, ZeroSignal) {
  auto p = build_partition(30.0, 10.0);
  auto s = windowed_recentered_signal([](double) { return 0.0; }, p, 1, 0.05);
  for (double v : s.samples) EXPECT_EQ(v, 0.0);
}

TEST(Windowed, PlateauOfInteriorWindow) {
  auto p = build_partition(60.0, 10.0);
  auto s = windowed_recentered_signal([](double) { return 1.0; }, p, 2, 0.1);
  EXPECT_DOUBLE_EQ(s.t0, -10.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s.time(i)) < 5.0) {
      EXPECT_EQ(s.samples[i], 1.0);
    }
}

TEST(Windowed, ChirpMatchesPointwiseProduct) {
  IncidentSpec spec;
  spec.kind = IncidentKind::Chirp;
  auto inc = make_incident(spec);
  auto p = build_partition(180.0, 10.0);
  auto s = windowed_recentered_signal(inc.signal, p, 3, 0.03);
  EXPECT_DOUBLE_EQ(p.centers[3], 45.0);
  EXPECT_NEAR(s.dt * double(s.size() - 1), 20.0, 1e-12);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.time(i);
    EXPECT_NEAR(s.samples[i], window_shape(t, 10.0) * inc(t + 45.0), 1e-15);
  }
}

TEST(Windowed, SampledInputInterpolates) {
  TimeSignal a;
  a.t0 = -5.0;
  a.dt = 0.01;
  for (int i = 0; i <= 4000; ++i) a.samples.push_back(std::sin(0.7 * a.time(i)));
  auto p = build_partition(30.0, 10.0);
  auto s = windowed_recentered_signal(a, p, 1, 0.05);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.time(i);
    EXPECT_NEAR(s.samples[i], window_shape(t, 10.0) * std::sin(0.7 * (t + 15.0)), 1e-12);
  }
}

TEST(Incident, GaussianSpectrumPeak) {
  IncidentSpec spec;
  spec.omega0 = 12.0;
  spec.sigma = 2.0;
  auto inc = make_incident(spec);
  EXPECT_NEAR(std::abs(inc.spectrum(12.0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(inc.spectrum(-12.0)), 1.0, 1e-15);
}

TEST(Incident, ChirpAtZero) {
  IncidentSpec spec;
  spec.kind = IncidentKind::Chirp;
  auto inc = make_incident(spec);
  EXPECT_NEAR(inc(0.0), std::sin(6.0 + 36.0 / 4000.0), 1e-15);
}

TEST(Incident, SphereTestPeak) {
  auto inc = make_incident(sphere_test_incidence());
  EXPECT_DOUBLE_EQ(inc(6.0), 5.0);
}

TEST(Incident, SpectraMatchQuadrature) {
  for (auto spec : {IncidentSpec{}, sphere_test_incidence(), wideband_incidence()[1]}) {
    auto inc = make_incident(spec);
    for (double w : {0.0, 3.0, 11.5}) {
      cplx sum = 0.0;
      const double dt = 1e-3;
      for (int i = -40000; i <= 40000; ++i) {
        const double t = i * dt;
        sum += inc(t) * std::exp(I * (w * t)) * dt;
      }
      EXPECT_NEAR(std::abs(sum - inc.spectrum(w)), 0.0, 1e-12) << to_string(spec.kind) << " " << w;
    }
  }
}

TEST(Incident, Validation) {
  IncidentSpec spec;
  spec.direction = {1.0, 1.0, 0.0};
  EXPECT_THROW(make_incident(spec), InvalidArgument);
  spec.direction = {1.0, 0.0, 0.0};
  spec.sigma = 0.0;
  EXPECT_THROW(make_incident(spec), InvalidArgument);
  EXPECT_THROW(incident_kind_from_string("square"), InvalidArgument);
}

TEST(Signal, CsvExport) {
  TimeSignal s{0.0, 0.5, {1.0, 2.0}};
  std::ostringstream os;
  write_csv(os, s);
  EXPECT_EQ(os.str(), "0,1\n0.5,2\n");
}
