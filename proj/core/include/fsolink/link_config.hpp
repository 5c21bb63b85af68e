#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>

namespace fsolink {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Actuator { none, doppler, group_delay };
enum class StabilizationMode { unstabilized, doppler, group_delay };

// physical: the real one-way delay (sub-sample at practical rates), applied as a
// first-order fractional delay. scaled: a delay of at least kMinScaledDelaySamples
// so the delayed-copy transfer structure lands in band.
enum class DelayMode { physical, scaled };

inline constexpr double kMinScaledDelaySamples = 10.0;

std::string_view to_string(Actuator a) noexcept;
std::string_view to_string(StabilizationMode m) noexcept;
std::string_view to_string(DelayMode m) noexcept;
Actuator actuator_from_string(std::string_view name);
StabilizationMode mode_from_string(std::string_view name);
DelayMode delay_mode_from_string(std::string_view name);
Actuator actuator_for(StabilizationMode m) noexcept;

struct ServoConfig {
  double kp = 0.5;                                   // dimensionless
  double ki_per_s = kTwoPi * 1.0e4;                  // 1/s
  double bandwidth_hint_hz = 1.0e4;
  bool enabled = true;
  // Treat the actuator's return pass as acting now rather than 2T ago, which makes
  // the loop null (err + 2 * actuator) and realizes the half-sum drive literally.
  bool half_sum_drive = true;
  double integrator_clamp_rad = 1.0e6;
  double divergence_threshold_rad = 1.0e3;

  // Finite-bandwidth loop for delay-scaled validation runs.
  static ServoConfig scaled_default();
  // Loop with unity gain far above the simulated band and the exact round-trip
  // plant, standing in for the analog servo of a sub-microsecond link.
  static ServoConfig physical_default();

  void validate() const;
};

struct LinkConfig {
  double nu_p_hz = 193.1e12;
  double nu_s_hz = 197.2e12;
  double nu_lo_hz = 75.0e6;
  double nu_rm_hz = -85.0e6;
  double meas_beat_hz = 10.0e6;
  std::optional<double> link_length_m = 150.0;
  std::optional<double> delay_s;
  Actuator actuator = Actuator::doppler;
  ServoConfig servo = ServoConfig::physical_default();
  DelayMode delay_mode = DelayMode::physical;
  double fs_hz = 20.0e3;
  std::size_t samples = std::size_t(1) << 21;  // output length

  static LinkConfig physical_defaults();
  // T = 1 ms at 100 kHz.
  static LinkConfig scaled_defaults();

  // One-way delay T (s): delay_s if given, otherwise link_length_m / c.
  double one_way_delay_s() const;
  double duration_s() const { return static_cast<double>(samples) / fs_hz; }
  // Samples the loop needs to settle, 10 integrator time constants or 10 samples
  // for a proportional-only loop; the same for every mode so inputs are shared.
  std::size_t settling_samples() const;

  // Copy configured for `mode`: unstabilized opens the loop and removes the actuator.
  LinkConfig for_mode(StabilizationMode mode) const;

  // Throws Errc::configuration naming the offending field.
  void validate() const;
};

}  // namespace fsolink
