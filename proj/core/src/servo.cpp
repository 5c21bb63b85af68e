#include "fsolink/servo.hpp"

#include <algorithm>
#include <cmath>

namespace fsolink {

PiServo::PiServo(const ServoConfig& config) : config_(config) { config_.validate(); }

double PiServo::update(double error_rad, double dt_s) {
  if (faulted_) return command_;
  if (!std::isfinite(error_rad)) {
    faulted_ = true;
    return command_;
  }
  const double clamp = config_.integrator_clamp_rad;
  double next = integrator_ + config_.ki_per_s * dt_s * error_rad;
  if (std::abs(next) > clamp) {
    next = std::clamp(next, -clamp, clamp);
    saturated_ = true;
  }
  integrator_ = next;
  command_ = 0.5 * (config_.kp * error_rad + integrator_);
  return command_;
}

double PiServo::feedthrough_gain(double dt_s) const noexcept {
  return 0.5 * (config_.kp + config_.ki_per_s * dt_s);
}

void PiServo::reset() noexcept {
  integrator_ = 0.0;
  command_ = 0.0;
  saturated_ = false;
  faulted_ = false;
}

double servo_update(PiServo& state, double error_rad, double dt_s) {
  return state.update(error_rad, dt_s);
}

}  // namespace fsolink
