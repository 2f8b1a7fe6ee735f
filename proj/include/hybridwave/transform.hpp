#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "hybridwave/core.hpp"
#include "hybridwave/fc_gram.hpp"
#include "hybridwave/fft.hpp"
#include "hybridwave/parallel.hpp"
#include "hybridwave/signals.hpp"

namespace hybridwave {

namespace detail {

// exp(i pi x), with x reduced modulo 2 in extended precision.
inline cplx unit_phase(long double x) {
  x -= 2.0L * std::floor(x / 2.0L);
  const double ph = pi * static_cast<double>(x);
  return {std::cos(ph), std::sin(ph)};
}

// exp(i pi s j^2 / L)
inline cplx chirp(double s, long long j, long long L) {
  return unit_phase(static_cast<long double>(s) * static_cast<long double>(j * j) /
                    static_cast<long double>(L));
}

}  // namespace detail

// Fractional DFT G_k = sum_m x_m exp(-2 pi i alpha m k / L), with m, k in
// [-L/2, L/2) stored at offset L/2. Chirp decomposition, power-of-two cyclic
// convolution of length Q >= 2L.
class FrftPlan {
 public:
  FrftPlan(std::size_t L, double alpha) : L_(L), alpha_(alpha) {
    require(L >= 2 && L % 2 == 0, "frft: length must be even");
    Q_ = next_pow2(2 * L);
    const auto Ll = static_cast<long long>(L);
    const auto half = Ll / 2;
    pre_.resize(L);
    for (long long i = 0; i < Ll; ++i) pre_[static_cast<std::size_t>(i)] = std::conj(detail::chirp(alpha, i - half, Ll));
    zhat_.assign(Q_, cplx(0.0));
    for (long long j = -(Ll - 1); j <= Ll - 1; ++j) {
      const auto idx = static_cast<std::size_t>((j + static_cast<long long>(Q_)) % static_cast<long long>(Q_));
      zhat_[idx] = detail::chirp(alpha, j, Ll);
    }
    fft::forward(zhat_);
  }

  std::size_t size() const { return L_; }
  double alpha() const { return alpha_; }

  cvec operator()(const cvec& x) const {
    require(x.size() == L_, "frft: input length mismatch");
    cvec y(Q_, cplx(0.0));
    for (std::size_t i = 0; i < L_; ++i) y[i] = x[i] * pre_[i];
    fft::forward(y);
    const double scale = 1.0 / static_cast<double>(Q_);
    for (std::size_t i = 0; i < Q_; ++i) y[i] *= zhat_[i] * scale;
    fft::backward(y);
    cvec out(L_);
    for (std::size_t k = 0; k < L_; ++k) out[k] = y[k] * pre_[k];
    return out;
  }

 private:
  std::size_t L_, Q_;
  double alpha_;
  cvec pre_, zhat_;
};

inline cvec frft(const cvec& x, double alpha) { return FrftPlan(x.size(), alpha)(x); }

// Fast evaluation of d_n = sum_m c_m b(beta m - gamma n - shift) for
// n = n0..n0+N-1, m = -M/2..M/2-1 (c stored with offset M/2).
class ScaledConvolutionPlan {
 public:
  template <class Kernel>
  ScaledConvolutionPlan(std::size_t M, std::size_t N, long long n0, double beta,
                        double gamma, const Kernel& kernel, double oversample = 4.0,
                        double shift = 0.0)
      : M_(M), N_(N), n0_(n0), beta_(beta), gamma_(gamma), shift_(shift) {
    require(M >= 1 && N >= 1, "scaled convolution: M and N must be positive");
    require(oversample >= 1.0, "scaled convolution: oversample must be >= 1");
    const double mlo = -static_cast<double>(M / 2);
    const double mhi = static_cast<double>(M) - static_cast<double>(M / 2) - 1.0;
    const double bm_lo = std::min(beta * mlo, beta * mhi);
    const double bm_hi = std::max(beta * mlo, beta * mhi);
    const double gn_lo = std::min(0.0, -gamma * double(N - 1));
    const double gn_hi = std::max(0.0, -gamma * double(N - 1));
    L0_ = even_ceil(std::max(-2.0 * (bm_lo + gn_lo), 2.0 * (bm_hi + gn_hi + 1.0)));
    L_ = even_ceil(static_cast<double>(std::max({L0_, M, N})) * oversample);

    // Kernel re-centered at the first output index and at the middle of the
    // q range: sampled as b(j - L/2 + qc - gamma n0 - shift).
    qc_ = std::round(0.5 * (bm_lo + gn_lo + bm_hi + gn_hi));
    const double offset = gamma * static_cast<double>(n0) + shift - qc_;
    const auto Ll = static_cast<long long>(L_);
    cvec b(L_);
    for (long long j = 0; j < Ll; ++j) {
      const double q = static_cast<double>(j - Ll / 2);
      b[static_cast<std::size_t>(j)] = (j % 2 ? -1.0 : 1.0) * cplx(kernel(q - offset));
    }
    fft::forward(b);
    // B_p for p = k - L/2 is (-1)^p FFT((-1)^j b_j)[k]; the extra phases move
    // the kernel origin back by qc and re-index the output to nu = k + L/2.
    Bp_.resize(L_);
    for (long long k = 0; k < Ll; ++k) {
      const long long p = k - Ll / 2;
      const cplx raw = ((p % 2) ? -1.0 : 1.0) * b[static_cast<std::size_t>(k)];
      if (k == 0) nyquist_ = raw;
      const long double ph = -2.0L * static_cast<long double>(qc_) * p / static_cast<long double>(Ll) -
                             static_cast<long double>(gamma) * p;
      Bp_[static_cast<std::size_t>(k)] = raw * detail::unit_phase(ph);
    }
    frft_c_ = std::make_shared<FrftPlan>(L_, -beta);
    frft_d_ = std::make_shared<FrftPlan>(L_, gamma);
  }

  std::size_t M() const { return M_; }
  std::size_t N() const { return N_; }
  std::size_t L() const { return L_; }
  std::size_t L0() const { return L0_; }
  long long n0() const { return n0_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  cvec execute(const cvec& c) const {
    if (c.size() != M_)
      throw InvalidArgument("scaled convolution: expected " + std::to_string(M_) +
                            " coefficients, got " + std::to_string(c.size()));
    cvec x(L_, cplx(0.0));
    const std::size_t off = L_ / 2 - M_ / 2;
    for (std::size_t j = 0; j < M_; ++j) x[off + j] = c[j];
    cvec C = (*frft_c_)(x);
    for (std::size_t p = 0; p < L_; ++p) C[p] *= Bp_[p];
    cvec G = (*frft_d_)(C);
    // Split the Nyquist mode p = -L/2 symmetrically (cos instead of e^{-i pi y})
    // so that real kernels and coefficients give real sums.
    cplx splus = 0.0, sminus = 0.0;
    for (std::size_t j = 0; j < M_; ++j) {
      const long double y = static_cast<long double>(beta_) * (static_cast<long double>(j) - static_cast<long double>(M_ / 2)) -
                            static_cast<long double>(qc_);
      splus += c[j] * detail::unit_phase(y);
      sminus += c[j] * detail::unit_phase(-y);
    }
    const cplx nyq = 0.5 * nyquist_;
    cvec d(N_);
    const double scale = 1.0 / static_cast<double>(L_);
    for (std::size_t nu = 0; nu < N_; ++nu) {
      const long double gn = static_cast<long double>(gamma_) * static_cast<long double>(nu);
      d[nu] = (G[nu] + nyq * (splus * detail::unit_phase(-gn) - sminus * detail::unit_phase(gn))) * scale;
    }
    return d;
  }

 private:
  std::size_t M_, N_;
  long long n0_;
  double beta_, gamma_, shift_;
  std::size_t L0_ = 0, L_ = 0;
  double qc_ = 0.0;
  cplx nyquist_ = 0.0;
  cvec Bp_;
  std::shared_ptr<FrftPlan> frft_c_, frft_d_;
};

template <class Kernel>
ScaledConvolutionPlan plan_scaled_convolution(std::size_t M, std::size_t N, long long n0,
                                              double beta, double gamma,
                                              const Kernel& kernel,
                                              double oversample = 4.0,
                                              double shift = 0.0) {
  return ScaledConvolutionPlan(M, N, n0, beta, gamma, kernel, oversample, shift);
}

// Exact O(MN) sum, parallel over n.
template <class Kernel>
cvec direct_scaled_convolution(const cvec& c, const Kernel& kernel, double beta,
                               double gamma, long long n0, std::size_t N,
                               double shift = 0.0) {
  const auto M = static_cast<long long>(c.size());
  cvec d(N);
  parallel_for(N, [&](std::size_t nu) {
    const double gn = gamma * static_cast<double>(n0 + static_cast<long long>(nu)) + shift;
    cplx s = 0.0;
    for (long long j = 0; j < M; ++j)
      s += c[static_cast<std::size_t>(j)] * kernel(beta * double(j - M / 2) - gn);
    d[nu] = s;
  });
  return d;
}

enum class ExpansionMode { Periodic, Continued };

inline std::string to_string(ExpansionMode m) {
  return m == ExpansionMode::Periodic ? "periodic" : "continued";
}

// F(delta + w) ~ sum_{m=-M/2}^{M/2-1} c_m exp(2 pi i m w / P) for |w| <= A.
struct TrigExpansion {
  cvec coeffs;
  double period = 0.0;
  double center = 0.0;
  double half_width = 0.0;
  ExpansionMode mode = ExpansionMode::Periodic;
  double fit_residual = 0.0;

  std::size_t M() const { return coeffs.size(); }
  double alpha() const { return period / two_pi; }
  cplx coefficient(long long m) const {
    return coeffs[static_cast<std::size_t>(m + static_cast<long long>(M() / 2))];
  }

  cplx operator()(double omega) const {
    const double w = omega - center;
    const auto h = static_cast<long long>(M() / 2);
    cplx s = 0.0;
    for (long long m = -h; m < static_cast<long long>(M()) - h; ++m)
      s += coefficient(m) * std::exp(cplx(0.0, two_pi * double(m) * w / period));
    return s;
  }

  // Kernel b(q) = 2A sinc((2A/P) q) of the term-wise transform.
  double kernel(double q) const { return 2.0 * half_width * sinc(2.0 * half_width / period * q); }
};

namespace detail {

// Coefficients of sum_m c_m exp(2 pi i m j / M) interpolating g_j, j = 0..M-1,
// re-referenced so that sample 0 sits at w = -shift (w measured from center).
inline cvec dft_coefficients(cvec g, double shift_over_period) {
  const std::size_t M = g.size();
  fft::forward(g);
  cvec c(M);
  const auto h = static_cast<long long>(M / 2);
  for (long long m = -h; m < static_cast<long long>(M) - h; ++m) {
    const auto src = static_cast<std::size_t>((m + static_cast<long long>(M)) % static_cast<long long>(M));
    c[static_cast<std::size_t>(m + h)] =
        g[src] / double(M) * std::exp(cplx(0.0, two_pi * double(m) * shift_over_period));
  }
  return c;
}

inline double sample_residual(const TrigExpansion& e, const cvec& F, double a, double h) {
  double r = 0.0;
  for (std::size_t j = 0; j < F.size(); ++j)
    r = std::max(r, std::abs(e(a + double(j) * h) - F[j]));
  return r;
}

}  // namespace detail

// Samples F_j = F(a + j (b-a)/(n-1)), j = 0..n-1, endpoints included.
// Periodic mode uses M = n-1 terms with the endpoint average at the seam;
// continued mode appends an FC(Gram) continuation (d, C) and uses M = n + C
// terms (C is increased by one when needed to make M even).
inline TrigExpansion fit_trig_expansion(const cvec& F, double a, double b,
                                        ExpansionMode mode, int d = 10, int C = 27) {
  require(b > a, "fit_trig_expansion: need b > a");
  require(F.size() >= 3, "fit_trig_expansion: need at least three samples");
  const std::size_t n = F.size();
  const double h = (b - a) / double(n - 1);
  TrigExpansion e;
  e.mode = mode;
  e.center = 0.5 * (a + b);
  e.half_width = 0.5 * (b - a);
  if (mode == ExpansionMode::Periodic) {
    const std::size_t M = n - 1;
    if (M % 2) throw InvalidArgument("fit_trig_expansion: periodic mode needs an even number of intervals, got M = " + std::to_string(M));
    cvec g(F.begin(), F.end() - 1);
    g[0] = 0.5 * (F.front() + F.back());
    e.period = b - a;
    e.coeffs = detail::dft_coefficients(std::move(g), 0.5);
  } else {
    require(static_cast<int>(n) >= d, "fit_trig_expansion: continued mode needs at least d = " + std::to_string(d) + " samples");
    const int Cm = C + static_cast<int>((n + static_cast<std::size_t>(C)) % 2);
    cvec g = fc_gram_operator(d, Cm)->extend(F);
    e.period = double(g.size()) * h;
    e.coeffs = detail::dft_coefficients(std::move(g), e.half_width / e.period);
  }
  e.fit_residual = detail::sample_residual(e, F, a, h);
  return e;
}

// I(t) = int_a^b F(w) exp(-iwt) dw from the expansion, at a single time.
inline cplx inverse_transform_at(const TrigExpansion& e, double t) {
  const double at = e.alpha() * t;
  const auto h = static_cast<long long>(e.M() / 2);
  cplx s = 0.0;
  for (long long m = -h; m < static_cast<long long>(e.M()) - h; ++m)
    s += e.coefficient(m) * e.kernel(at - double(m));
  return std::exp(cplx(0.0, -e.center * t)) * s;
}

// Reusable evaluator of I(t0 + n dt), n = 0..N-1, for expansions sharing
// (M, P, A); cost independent of t0.
class InverseTransformPlan {
 public:
  InverseTransformPlan(std::size_t M, double period, double half_width, double t0,
                       double dt, std::size_t N, double oversample = 4.0)
      : t0_(t0), dt_(dt), period_(period), half_width_(half_width),
        plan_(M, N, 0, 1.0, period / two_pi * dt,
              [=](double q) { return 2.0 * half_width * sinc(2.0 * half_width / period * q); },
              oversample, period / two_pi * t0) {
    require(dt > 0.0, "inverse transform: dt must be positive");
  }

  InverseTransformPlan(const TrigExpansion& e, double t0, double dt, std::size_t N,
                       double oversample = 4.0)
      : InverseTransformPlan(e.M(), e.period, e.half_width, t0, dt, N, oversample) {}

  const ScaledConvolutionPlan& convolution() const { return plan_; }

  cvec operator()(const TrigExpansion& e) const {
    require(e.M() == plan_.M() && std::abs(e.period - period_) <= 1e-12 * period_ &&
                std::abs(e.half_width - half_width_) <= 1e-12 * half_width_,
            "inverse transform: expansion does not match plan");
    cvec d = plan_.execute(e.coeffs);
    for (std::size_t n = 0; n < d.size(); ++n) {
      const double t = t0_ + double(n) * dt_;
      d[n] *= std::exp(cplx(0.0, -e.center * t));
    }
    return d;
  }

 private:
  double t0_, dt_, period_, half_width_;
  ScaledConvolutionPlan plan_;
};

// I(t0 + n dt) for n = 0..N-1.
inline cvec inverse_transform_from(const TrigExpansion& e, double t0, double dt,
                                   std::size_t N, double oversample = 4.0) {
  return InverseTransformPlan(e, t0, dt, N, oversample)(e);
}

// Grid t_n = n dt for n = n1..n2.
inline cvec inverse_transform_on_grid(const TrigExpansion& e, double dt, long long n1,
                                      long long n2, double oversample = 4.0) {
  require(n2 >= n1, "inverse transform: empty index range");
  return inverse_transform_from(e, double(n1) * dt, dt, static_cast<std::size_t>(n2 - n1 + 1), oversample);
}

// B(w) = int a(t) exp(iwt) dt by the trapezoid rule on the signal's samples.
template <class T>
cvec forward_windowed_transform(const BasicTimeSignal<T>& s, const rvec& omegas) {
  cvec out(omegas.size(), cplx(0.0));
  const std::size_t n = s.size();
  if (n == 0) return out;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wt = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      acc += wt * s.samples[j] * std::exp(cplx(0.0, omegas[i] * s.time(j)));
    }
    out[i] = acc * s.dt;
  }
  return out;
}

}  // namespace hybridwave
