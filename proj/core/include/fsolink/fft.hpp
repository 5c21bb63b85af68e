#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace fsolink {

// Smallest 2^a 3^b 5^c 7^d that is >= n.
std::size_t next_fast_len(std::size_t n) noexcept;

// Real <-> half-complex transform of fixed size over owned, aligned buffers.
// Plans are created with FFTW_ESTIMATE so output does not depend on timing.
// Instances are single-owner; planning is serialized internally.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::span<double> real() noexcept { return {real_, n_}; }
  std::span<std::complex<double>> spectrum() noexcept;

  // real() -> spectrum(), X_k = sum_m x_m exp(-2 pi i k m / n).
  void forward();
  // spectrum() -> real(), unnormalized (no 1/n). Overwrites spectrum().
  void inverse();

 private:
  void release() noexcept;

  std::size_t n_ = 0;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace fsolink
