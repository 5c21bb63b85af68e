#include "fsolink/link_config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fsolink/error.hpp"

namespace fsolink {

namespace {

void require(bool ok, std::string_view key, std::string_view why) {
  if (!ok) throw Error(Errc::configuration, fmt::format("{}: {}", key, why));
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(Actuator a) noexcept {
  switch (a) {
    case Actuator::none: return "none";
    case Actuator::doppler: return "doppler";
    case Actuator::group_delay: return "group-delay";
  }
  return "none";
}

std::string_view to_string(StabilizationMode m) noexcept {
  switch (m) {
    case StabilizationMode::unstabilized: return "unstabilized";
    case StabilizationMode::doppler: return "doppler";
    case StabilizationMode::group_delay: return "group-delay";
  }
  return "unstabilized";
}

std::string_view to_string(DelayMode m) noexcept {
  return m == DelayMode::physical ? "physical" : "scaled";
}

Actuator actuator_from_string(std::string_view name) {
  if (name == "none") return Actuator::none;
  if (name == "doppler" || name == "aom") return Actuator::doppler;
  if (name == "group-delay" || name == "group_delay" || name == "stretcher")
    return Actuator::group_delay;
  throw Error(Errc::configuration, fmt::format("actuator: unknown value '{}'", name));
}

StabilizationMode mode_from_string(std::string_view name) {
  if (name == "unstabilized" || name == "none") return StabilizationMode::unstabilized;
  if (name == "doppler" || name == "aom") return StabilizationMode::doppler;
  if (name == "group-delay" || name == "group_delay" || name == "stretcher")
    return StabilizationMode::group_delay;
  throw Error(Errc::configuration, fmt::format("mode: unknown value '{}'", name));
}

DelayMode delay_mode_from_string(std::string_view name) {
  if (name == "physical") return DelayMode::physical;
  if (name == "scaled") return DelayMode::scaled;
  throw Error(Errc::configuration, fmt::format("delay_mode: unknown value '{}'", name));
}

Actuator actuator_for(StabilizationMode m) noexcept {
  switch (m) {
    case StabilizationMode::unstabilized: return Actuator::none;
    case StabilizationMode::doppler: return Actuator::doppler;
    case StabilizationMode::group_delay: return Actuator::group_delay;
  }
  return Actuator::none;
}

ServoConfig ServoConfig::scaled_default() { return ServoConfig{}; }

ServoConfig ServoConfig::physical_default() {
  ServoConfig s;
  s.kp = 1.0;
  s.ki_per_s = kTwoPi * 1.0e7;
  s.bandwidth_hint_hz = 1.0e7;
  s.half_sum_drive = false;
  return s;
}

void ServoConfig::validate() const {
  require(std::isfinite(kp) && kp >= 0.0, "servo.kp", "must be finite and >= 0");
  require(std::isfinite(ki_per_s) && ki_per_s >= 0.0, "servo.ki_per_s", "must be finite and >= 0");
  require(std::isfinite(bandwidth_hint_hz) && bandwidth_hint_hz >= 0.0,
          "servo.bandwidth_hint_hz", "must be finite and >= 0");
  require(positive(integrator_clamp_rad), "servo.integrator_clamp_rad", "must be > 0");
  require(positive(divergence_threshold_rad), "servo.divergence_threshold_rad", "must be > 0");
  require(!enabled || kp > 0.0 || ki_per_s > 0.0, "servo", "enabled loop needs kp or ki > 0");
}

std::size_t LinkConfig::settling_samples() const {
  if (servo.ki_per_s > 0.0) return static_cast<std::size_t>(std::ceil(10.0 * fs_hz / servo.ki_per_s));
  return servo.kp > 0.0 ? 10 : 0;
}

LinkConfig LinkConfig::physical_defaults() { return LinkConfig{}; }

LinkConfig LinkConfig::scaled_defaults() {
  LinkConfig c;
  c.delay_mode = DelayMode::scaled;
  c.link_length_m.reset();
  c.delay_s = 1.0e-3;
  c.fs_hz = 100.0e3;
  c.servo = ServoConfig::scaled_default();
  return c;
}

double LinkConfig::one_way_delay_s() const {
  if (delay_s) return *delay_s;
  if (link_length_m) return *link_length_m / kSpeedOfLight;
  throw Error(Errc::configuration, "link_length_m or delay_s must be set");
}

LinkConfig LinkConfig::for_mode(StabilizationMode mode) const {
  LinkConfig c = *this;
  c.actuator = actuator_for(mode);
  c.servo.enabled = mode != StabilizationMode::unstabilized;
  return c;
}

void LinkConfig::validate() const {
  require(positive(nu_p_hz), "nu_p_hz", "must be > 0");
  require(positive(nu_s_hz), "nu_s_hz", "must be > 0");
  require(std::isfinite(nu_lo_hz), "nu_lo_hz", "must be finite");
  require(std::isfinite(nu_rm_hz), "nu_rm_hz", "must be finite");
  require(positive(meas_beat_hz), "meas_beat_hz", "must be > 0");
  require(std::abs(std::abs(nu_lo_hz + nu_rm_hz) - meas_beat_hz) <= 1e-6 * meas_beat_hz,
          "nu_lo_hz/nu_rm_hz",
          fmt::format("|nu_lo + nu_rm| = {} Hz must equal the measurement beat {} Hz",
                      std::abs(nu_lo_hz + nu_rm_hz), meas_beat_hz));
  require(!(link_length_m && delay_s), "link_length_m/delay_s", "set one, not both");
  require(link_length_m || delay_s, "link_length_m/delay_s", "one of them is required");
  if (link_length_m) require(positive(*link_length_m), "link_length_m", "must be > 0");
  if (delay_s) require(positive(*delay_s), "delay_s", "must be > 0");
  require(positive(fs_hz), "fs_hz", "must be > 0");
  require(samples >= 16, "samples", "must be >= 16");
  require(!(actuator == Actuator::none && servo.enabled), "actuator",
          "'none' requires the servo to be disabled");
  servo.validate();
  if (servo.ki_per_s > 0.0) {
    const double settle = 10.0 * fs_hz / servo.ki_per_s;
    require(settle <= static_cast<double>(samples), "servo.ki_per_s",
            fmt::format("loop settling ({:.3g} samples) exceeds the run length {}", settle, samples));
  }
  if (delay_mode == DelayMode::scaled) {
    const double d = one_way_delay_s() * fs_hz;
    require(d >= kMinScaledDelaySamples, "fs_hz",
            fmt::format("scaled mode needs T * fs >= {} samples (got {:.3g})",
                        kMinScaledDelaySamples, d));
  }
}

}  // namespace fsolink
