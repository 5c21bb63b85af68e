#pragma once

#include "fsolink/link_config.hpp"

namespace fsolink {

// Discrete PI law with the half-gain of the two-pass drive:
//   I_n = clamp(I_{n-1} + ki * dt * e_n),   u_n = (kp * e_n + I_n) / 2.
// The integrator is clamped at +/- integrator_clamp_rad; hitting the clamp
// latches saturated(). A non-finite error latches faulted() and freezes the
// command (the loop is open from then on).
class PiServo {
 public:
  explicit PiServo(const ServoConfig& config);

  double update(double error_rad, double dt_s);

  double command() const noexcept { return command_; }
  double integrator() const noexcept { return integrator_; }
  bool saturated() const noexcept { return saturated_; }
  bool faulted() const noexcept { return faulted_; }

  // d(command)/d(error) for the current step.
  double feedthrough_gain(double dt_s) const noexcept;
  // Command produced by a zero error on the next step.
  double zero_error_command() const noexcept { return 0.5 * integrator_; }

  void reset() noexcept;

 private:
  ServoConfig config_;
  double integrator_ = 0.0;
  double command_ = 0.0;
  bool saturated_ = false;
  bool faulted_ = false;
};

// Free-function form of one servo step on caller-owned state.
double servo_update(PiServo& state, double error_rad, double dt_s);

}  // namespace fsolink
