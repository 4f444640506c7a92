#ifndef NETSPECTRO_DETAIL_FFT_HPP
#define NETSPECTRO_DETAIL_FFT_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace netspectro::detail {

// FFTW's planner is process-global state; plan creation and destruction are
// serialized here so library calls stay safe to run from multiple threads.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline void fft_inplace(std::vector<std::complex<double>>& v, int sign) {
  auto* data = reinterpret_cast<fftw_complex*>(v.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_ESTIMATE leaves the buffer contents untouched while planning.
    plan = fftw_plan_dft_1d(static_cast<int>(v.size()), data, data, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

inline void fft_forward(std::vector<std::complex<double>>& v) {
  fft_inplace(v, FFTW_FORWARD);
}

// Inverse transform including the 1/n normalization FFTW leaves out.
inline void fft_inverse(std::vector<std::complex<double>>& v) {
  fft_inplace(v, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(v.size());
  for (auto& x : v) x *= s;
}

// Smallest length >= n whose prime factors are all in {2,3,5,7}; FFTW has
// fast kernels for exactly these radices.
inline std::size_t next_fast_len(std::size_t n) {
  if (n < 2) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t k = m;
    for (std::size_t f : {std::size_t{2}, std::size_t{3}, std::size_t{5}, std::size_t{7}})
      while (k % f == 0) k /= f;
    if (k == 1) return m;
  }
}

}  // namespace netspectro::detail

#endif
