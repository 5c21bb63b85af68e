#include "fsolink/fft.hpp"

#include <mutex>
#include <utility>

#include <fftw3.h>

#include "fsolink/error.hpp"

namespace fsolink {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::size_t next_fast_len(std::size_t n) noexcept {
  if (n <= 1) return 1;
  std::size_t best = std::size_t(1) << 62;
  for (std::size_t p7 = 1; p7 < best; p7 *= 7)
    for (std::size_t p5 = p7; p5 < best; p5 *= 5)
      for (std::size_t p3 = p5; p3 < best; p3 *= 3) {
        std::size_t v = p3;
        while (v < n) v *= 2;
        if (v < best) best = v;
      }
  return best;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw Error(Errc::input, "FFT size must be >= 2");
  real_ = fftw_alloc_real(n);
  complex_ = fftw_alloc_complex(n / 2 + 1);
  if (!real_ || !complex_) {
    release();
    throw Error(Errc::input, "FFT buffer allocation failed");
  }
  auto* c = static_cast<fftw_complex*>(complex_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, c, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      complex_(std::exchange(other.complex_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    real_ = std::exchange(other.real_, nullptr);
    complex_ = std::exchange(other.complex_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::release() noexcept {
  {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  }
  forward_plan_ = inverse_plan_ = nullptr;
  if (real_) fftw_free(real_);
  if (complex_) fftw_free(complex_);
  real_ = nullptr;
  complex_ = nullptr;
}

std::span<std::complex<double>> RealFft::spectrum() noexcept {
  return {reinterpret_cast<std::complex<double>*>(complex_), n_ / 2 + 1};
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

}  // namespace fsolink
