#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fsolink {

// Uniformly sampled real-valued series. Phases are in rad; the same container
// carries time-of-flight series (s) where noted.
class PhaseSeries {
 public:
  PhaseSeries(std::vector<double> samples, double fs_hz, double t0_s = 0.0,
              std::string label = {});

  std::span<const double> samples() const noexcept { return samples_; }
  std::vector<double>& mutable_samples() noexcept { return samples_; }
  double fs_hz() const noexcept { return fs_hz_; }
  double t0_s() const noexcept { return t0_s_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double dt() const noexcept { return 1.0 / fs_hz_; }

  // Throws Errc::input if any invariant is broken (after mutation through mutable_samples).
  void validate() const;

 private:
  std::vector<double> samples_;
  double fs_hz_;
  double t0_s_;
  std::string label_;
};

}  // namespace fsolink
