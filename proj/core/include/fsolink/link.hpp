#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fsolink/link_config.hpp"
#include "fsolink/phase_series.hpp"
#include "fsolink/psd_model.hpp"
#include "fsolink/servo.hpp"

namespace fsolink {

// Laser phases (rad) and atmospheric piston time-of-flight (s), sampled together.
// The atmospheric phase at carrier nu is 2 pi nu dT_atm.
struct NoiseInputs {
  PhaseSeries phi_p;
  PhaseSeries phi_s;
  PhaseSeries dt_atm;

  std::size_t size() const noexcept { return phi_p.size(); }
  double fs_hz() const noexcept { return phi_p.fs_hz(); }
  void validate() const;

  static NoiseInputs quiet(std::size_t n, double fs_hz);
};

// Synthesizes atmospheric phase as seen at nu_ref and converts it to time of flight.
PhaseSeries atmosphere_from_psd(const PsdModel& model, double nu_ref_hz, double fs_hz,
                                std::size_t n, std::uint64_t seed);

// Integer part and fraction of a delay in samples; read as
// (1 - frac) x[n - whole] + frac x[n - whole - 1].
struct FractionalDelay {
  std::size_t whole = 0;
  double frac = 0.0;

  static FractionalDelay from_seconds(double delay_s, double fs_hz);
  // Samples of history needed before index n can be read.
  std::size_t reach() const noexcept { return whole + (frac > 0.0 ? 1 : 0); }
  double read(std::span<const double> x, std::size_t n) const noexcept;
};

// Phase-domain terms of the primary round-trip beat after mixing down by
// 2 nu_lo + 2 nu_rm. "delayed" means the pass that left the local site 2T ago.
struct ErrorTerms {
  double phi_p_now = 0.0;
  double phi_p_delayed = 0.0;
  double atm_now = 0.0;
  double atm_delayed = 0.0;
  double actuator_now = 0.0;
  double actuator_delayed = 0.0;
};

// err = -phi_p(t) + phi_p(t-2T) + act(t) + act(t-2T) + atm(t) + atm(t-2T)
double error_signal(const ErrorTerms& terms) noexcept;

// Correction phase the actuator imposes at `carrier_hz` for a servo command in rad
// at the primary carrier. Doppler: -command at every carrier. Group delay: the
// stretcher delay tau_c = -command / (2 pi nu_p), giving 2 pi carrier tau_c.
double apply_actuator(Actuator actuator, double nu_p_hz, double command_rad, double carrier_hz);

enum class LockState { open, acquiring, locked, saturated, diverged, fault };
std::string_view to_string(LockState s) noexcept;

struct LockEvent {
  std::size_t sample = 0;
  LockState state = LockState::open;
};

struct RunFlags {
  bool saturated = false;
  bool diverged = false;
  bool fault = false;

  bool any() const noexcept { return saturated || diverged || fault; }
};

// Precomputed delays, servo and actuator history for one run.
class LinkState {
 public:
  const LinkConfig& config() const noexcept { return config_; }
  double one_way_delay_s() const noexcept { return delay_s_; }
  const FractionalDelay& one_way() const noexcept { return one_way_; }
  const FractionalDelay& round_trip() const noexcept { return round_trip_; }
  // First sample at which the servo may run (round-trip history available).
  std::size_t loop_start() const noexcept { return loop_start_; }
  // Servo settling allowance in samples.
  std::size_t filter_latency() const noexcept { return latency_; }
  // Input samples consumed before the first output sample.
  std::size_t warmup() const noexcept { return warmup_; }
  std::size_t input_length() const noexcept { return warmup_ + config_.samples; }

  const PiServo& servo() const noexcept { return servo_; }
  LockState lock_state() const noexcept { return lock_; }
  std::size_t sample_index() const noexcept { return index_; }

 private:
  friend LinkState make_link(const LinkConfig& config);
  friend struct LinkStepper;

  explicit LinkState(const LinkConfig& config);

  LinkConfig config_;
  double delay_s_ = 0.0;
  FractionalDelay one_way_;
  FractionalDelay round_trip_;
  std::size_t loop_start_ = 0;
  std::size_t latency_ = 0;
  std::size_t warmup_ = 0;
  PiServo servo_;
  std::vector<double> actuator_;  // command history (rad at nu_p)
  LockState lock_ = LockState::open;
  std::size_t index_ = 0;
};

// Validates the configuration and sizes the state.
LinkState make_link(const LinkConfig& config);

struct LinkTrace {
  std::vector<double> error_rad;
  std::vector<double> actuator_cmd_rad;
  std::vector<LockEvent> events;
};

struct LinkResult {
  PhaseSeries meas;  // measurement-signal phase deviation, rad
  LinkTrace trace;   // aligned with meas; empty vectors if not recorded
  RunFlags flags;
  std::size_t warmup = 0;
};

struct RunOptions {
  bool record_trace = true;
};

// Runs the two-way chain sample by sample. Inputs must hold at least
// warmup + samples points; the first warmup outputs are dropped.
LinkResult run_link(const LinkConfig& config, const NoiseInputs& inputs, StabilizationMode mode,
                    const RunOptions& options = {});

}  // namespace fsolink
