#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "hybridwave/core.hpp"

namespace hybridwave {

// Uniformly sampled signal: value i sits at t0 + i*dt.
template <class T>
struct BasicTimeSignal {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<T> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_end() const {
    return samples.empty() ? t0 : time(samples.size() - 1);
  }
};

using TimeSignal = BasicTimeSignal<double>;
using ComplexTimeSignal = BasicTimeSignal<cplx>;

// Local 6-point Lagrange interpolation of a sampled signal, zero outside its
// support.
inline double interpolate(const TimeSignal& s, double t) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  const double x = (t - s.t0) / s.dt;
  if (x < -1e-9 || x > static_cast<double>(n - 1) + 1e-9) return 0.0;
  if (n < 6) {
    auto i = static_cast<std::size_t>(std::lround(std::clamp(x, 0.0, double(n - 1))));
    return s.samples[i];
  }
  long i0 = static_cast<long>(std::floor(x)) - 2;
  i0 = std::clamp(i0, 0L, static_cast<long>(n) - 6);
  double v = 0.0;
  for (int j = 0; j < 6; ++j) {
    double l = 1.0;
    for (int m = 0; m < 6; ++m)
      if (m != j) l *= (x - double(i0 + m)) / double(j - m);
    v += l * s.samples[static_cast<std::size_t>(i0 + j)];
  }
  return v;
}

// Smooth step: eta(0) = 1, eta(1) = 0, all derivatives vanish at both ends.
inline double eta(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  u = std::clamp(u, 1e-14, 1.0 - 1e-14);
  return std::exp(2.0 * std::exp(-1.0 / u) / (u - 1.0));
}

// Window of half-width H: 1 on |t| < H/2, 0 on |t| > H.
inline double window_shape(double t, double H) {
  const double h2 = 0.5 * H;
  if (t < -H || t > H) return 0.0;
  if (t <= -h2) return 1.0 - eta((t + H) / h2);
  if (t >= h2) return eta((t - h2) / h2);
  return 1.0;
}

struct WindowPartition {
  double H = 10.0;
  std::vector<double> centers;

  int K() const { return static_cast<int>(centers.size()); }
};

// Centers s_k = 3kH/2 (k = 0..K-1) with K minimal such that the windows sum to
// one on [0, T_end].
inline WindowPartition build_partition(double T_end, double H) {
  require(T_end > 0.0, "build_partition: T_end must be positive");
  require(H > 0.0, "build_partition: H must be positive");
  WindowPartition p;
  p.H = H;
  for (int k = 0;; ++k) {
    const double s = 1.5 * H * k;
    p.centers.push_back(s);
    if (s + 0.5 * H >= T_end) break;
  }
  return p;
}

// w_k(t) for k in [0, K).
inline double window_value(const WindowPartition& p, int k, double t) {
  if (k < 0 || k >= p.K())
    throw std::out_of_range("window_value: partition index " +
                            std::to_string(k) + " out of range");
  return window_shape(t - p.centers[static_cast<std::size_t>(k)], p.H);
}

// Samples of w(t) a(t + s_k) on t in [-H, H], with the spacing reduced so that
// it divides 2H.
template <class Signal>
TimeSignal windowed_recentered_signal(const Signal& a, const WindowPartition& p,
                                      int k, double dt_fine) {
  require(dt_fine > 0.0, "windowed_recentered_signal: dt_fine must be positive");
  if (k < 0 || k >= p.K())
    throw std::out_of_range("windowed_recentered_signal: partition index out of range");
  const double H = p.H;
  const double s = p.centers[static_cast<std::size_t>(k)];
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * H / dt_fine - 1e-9));
  TimeSignal out;
  out.t0 = -H;
  out.dt = 2.0 * H / static_cast<double>(n);
  out.samples.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = out.time(j);
    const double w = window_shape(t, H);
    out.samples[j] = w == 0.0 ? 0.0 : w * a(t + s);
  }
  return out;
}

inline TimeSignal windowed_recentered_signal(const TimeSignal& a,
                                             const WindowPartition& p, int k,
                                             double dt_fine) {
  return windowed_recentered_signal(
      [&a](double t) { return interpolate(a, t); }, p, k, dt_fine);
}

enum class IncidentKind { GaussianModulated, Chirp, GaussianPulse, Custom };

inline std::string to_string(IncidentKind k) {
  switch (k) {
    case IncidentKind::GaussianModulated: return "gaussian-modulated";
    case IncidentKind::Chirp: return "chirp";
    case IncidentKind::GaussianPulse: return "gaussian-pulse";
    case IncidentKind::Custom: return "custom";
  }
  return "unknown";
}

inline IncidentKind incident_kind_from_string(const std::string& s) {
  if (s == "gaussian-modulated") return IncidentKind::GaussianModulated;
  if (s == "chirp") return IncidentKind::Chirp;
  if (s == "gaussian-pulse") return IncidentKind::GaussianPulse;
  if (s == "custom") return IncidentKind::Custom;
  throw InvalidArgument("unknown incident kind '" + s + "'");
}

// One plane-wave incidence u_inc(r, t) = -a(t - p.r / c).
//   gaussian-modulated: a(t) = amplitude (sigma/sqrt(pi)) exp(-sigma^2 (t-delay)^2/4) cos(omega0 (t-delay))
//   gaussian-pulse:     a(t) = amplitude exp(-(t-delay)^2/sigma^2)
//   chirp:              a(t) = amplitude sin(g + g^2/4000), g = 4t + 6 cos(t/sqrt(12))
//   custom:             interpolated samples
struct IncidentSpec {
  IncidentKind kind = IncidentKind::GaussianModulated;
  double amplitude = 1.0;
  double omega0 = 12.0;
  double sigma = 2.0;
  double delay = 0.0;
  std::array<double, 3> direction{1.0, 0.0, 0.0};
  double wave_speed = 1.0;
  TimeSignal samples;
};

struct Incident {
  IncidentSpec spec;
  std::function<double(double)> signal;
  // B(w) = int a(t) e^{iwt} dt in closed form; empty when unavailable.
  std::function<cplx(double)> spectrum;

  double operator()(double t) const { return signal(t); }
};

inline void validate(const IncidentSpec& s) {
  const auto& p = s.direction;
  const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  require(std::abs(norm - 1.0) < 1e-12, "incident direction must be a unit vector");
  require(s.wave_speed > 0.0, "wave speed must be positive");
  if (s.kind == IncidentKind::GaussianModulated || s.kind == IncidentKind::GaussianPulse)
    require(s.sigma > 0.0, "incident sigma must be positive");
  if (s.kind == IncidentKind::Custom)
    require(s.samples.size() >= 2 && s.samples.dt > 0.0,
            "custom incidence needs at least two samples with dt > 0");
}

inline Incident make_incident(const IncidentSpec& spec) {
  validate(spec);
  Incident inc;
  inc.spec = spec;
  const double A = spec.amplitude, w0 = spec.omega0, sg = spec.sigma, d = spec.delay;
  switch (spec.kind) {
    case IncidentKind::GaussianModulated:
      inc.signal = [=](double t) {
        const double x = t - d;
        return A * sg / std::sqrt(pi) * std::exp(-sg * sg * x * x / 4.0) * std::cos(w0 * x);
      };
      inc.spectrum = [=](double w) {
        const double g = std::exp(-(w - w0) * (w - w0) / (sg * sg)) +
                         std::exp(-(w + w0) * (w + w0) / (sg * sg));
        return A * g * std::exp(I * (w * d));
      };
      break;
    case IncidentKind::GaussianPulse:
      inc.signal = [=](double t) { return A * std::exp(-(t - d) * (t - d) / (sg * sg)); };
      inc.spectrum = [=](double w) {
        return A * sg * std::sqrt(pi) * std::exp(-sg * sg * w * w / 4.0) * std::exp(I * (w * d));
      };
      break;
    case IncidentKind::Chirp:
      inc.signal = [=](double t) {
        const double g = 4.0 * t + 6.0 * std::cos(t / std::sqrt(12.0));
        return A * std::sin(g + g * g / 4000.0);
      };
      break;
    case IncidentKind::Custom: {
      TimeSignal s = spec.samples;
      inc.signal = [s, A](double t) { return A * interpolate(s, t); };
      break;
    }
  }
  return inc;
}

// Pulse 5 exp(-(t-6)^2/2) along +x.
inline IncidentSpec sphere_test_incidence() {
  IncidentSpec s;
  s.kind = IncidentKind::GaussianPulse;
  s.amplitude = 5.0;
  s.sigma = std::sqrt(2.0);
  s.delay = 6.0;
  return s;
}

// Three pulses 0.33 exp(-(t-6 sigma-1)^2/sigma^2), sigma = 0.1, along the
// coordinate axes.
inline std::vector<IncidentSpec> wideband_incidence() {
  std::vector<IncidentSpec> out;
  for (int i = 0; i < 3; ++i) {
    IncidentSpec s;
    s.kind = IncidentKind::GaussianPulse;
    s.amplitude = 0.33;
    s.sigma = 0.1;
    s.delay = 6.0 * 0.1 + 1.0;
    s.direction = {0.0, 0.0, 0.0};
    s.direction[static_cast<std::size_t>(i)] = 1.0;
    out.push_back(s);
  }
  return out;
}

template <class T>
void write_csv(std::ostream& os, const BasicTimeSignal<T>& s) {
  char buf[96];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if constexpr (std::is_same_v<T, cplx>) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.time(i),
                    s.samples[i].real(), s.samples[i].imag());
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.time(i), s.samples[i]);
    }
    os << buf;
  }
}

}  // namespace hybridwave
