#pragma once

// Thin RAII wrapper over FFTW for real-to-complex transforms.
//
// Convention: the forward transform is unnormalized,
//   X[k] = sum_j x[j] exp(-2 pi i j k / n),
// and the inverse carries the 1/n factor, so inverse(forward(x)) == x.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "ctf/error.hpp"

namespace ctf {

namespace detail {
// FFTW planning and plan destruction are not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    if (n == 0) throw Error(Errc::ConfigInvalid, "FFT length must be positive");
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(inverse_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  /// Non-negative frequency half of the spectrum (n/2+1 bins).
  void forward(std::span<const double> in, std::span<std::complex<double>> out) {
    for (std::size_t i = 0; i < n_; ++i) real_[i] = in[i];
    fftw_execute(forward_);
    for (std::size_t k = 0; k < spectrum_size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
  }

  /// Inverse of `forward`, including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    for (std::size_t k = 0; k < spectrum_size(); ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    fftw_execute(inverse_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
  }

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace ctf
