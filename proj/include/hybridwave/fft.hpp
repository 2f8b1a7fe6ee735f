#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "hybridwave/core.hpp"

// In-place complex FFTs of arbitrary length backed by FFTW. Plans are cached
// per (length, direction); execution with new arrays is thread-safe.
namespace hybridwave::fft {

namespace detail {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    cvec scratch(static_cast<std::size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan =
        fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
  }
};

inline PlanCache& cache() {
  static PlanCache c;
  return c;
}

inline void run(cvec& x, int sign) {
  if (x.empty()) return;
  fftw_plan plan = cache().get(static_cast<int>(x.size()), sign);
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace detail

// X_k = sum_j x_j exp(-2 pi i jk/n)
inline void forward(cvec& x) { detail::run(x, FFTW_FORWARD); }

// x_j = sum_k X_k exp(+2 pi i jk/n), unnormalized
inline void backward(cvec& x) { detail::run(x, FFTW_BACKWARD); }

}  // namespace hybridwave::fft
