#include "fsolink/link.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fsolink/error.hpp"
#include "fsolink/synthesis.hpp"

namespace fsolink {

void NoiseInputs::validate() const {
  const std::size_t n = phi_p.size();
  const double fs = phi_p.fs_hz();
  if (phi_s.size() != n || dt_atm.size() != n)
    throw Error(Errc::input, fmt::format("noise input lengths differ ({}, {}, {})", n,
                                         phi_s.size(), dt_atm.size()));
  if (phi_s.fs_hz() != fs || dt_atm.fs_hz() != fs)
    throw Error(Errc::input, "noise inputs must share one sample rate");
  phi_p.validate();
  phi_s.validate();
  dt_atm.validate();
  for (double d : dt_atm.samples())
    if (std::abs(d) * fs > 0.1)
      throw Error(Errc::input, "atmospheric time-of-flight excursion is not small against 1/fs");
}

NoiseInputs NoiseInputs::quiet(std::size_t n, double fs_hz) {
  return {PhaseSeries(std::vector<double>(n, 0.0), fs_hz, 0.0, "phi_p"),
          PhaseSeries(std::vector<double>(n, 0.0), fs_hz, 0.0, "phi_s"),
          PhaseSeries(std::vector<double>(n, 0.0), fs_hz, 0.0, "dT_atm")};
}

PhaseSeries atmosphere_from_psd(const PsdModel& model, double nu_ref_hz, double fs_hz,
                                std::size_t n, std::uint64_t seed) {
  if (!(nu_ref_hz > 0.0)) throw Error(Errc::domain, "reference carrier must be > 0");
  auto phase = synthesize_phase_noise(model, fs_hz, n, seed);
  const double to_seconds = 1.0 / (kTwoPi * nu_ref_hz);
  auto& v = phase.mutable_samples();
  for (auto& x : v) x *= to_seconds;
  return PhaseSeries(std::move(v), fs_hz, 0.0, fmt::format("dT_atm(seed={})", seed));
}

FractionalDelay FractionalDelay::from_seconds(double delay_s, double fs_hz) {
  const double d = delay_s * fs_hz;
  FractionalDelay out;
  out.whole = static_cast<std::size_t>(std::floor(d));
  out.frac = d - static_cast<double>(out.whole);
  // Snap representation noise so integer delays read a single tap.
  if (out.frac < 1e-9) out.frac = 0.0;
  if (out.frac > 1.0 - 1e-9) {
    ++out.whole;
    out.frac = 0.0;
  }
  return out;
}

double FractionalDelay::read(std::span<const double> x, std::size_t n) const noexcept {
  const double a = x[n - whole];
  if (frac == 0.0) return a;
  return (1.0 - frac) * a + frac * x[n - whole - 1];
}

double error_signal(const ErrorTerms& t) noexcept {
  return -t.phi_p_now + t.phi_p_delayed + t.actuator_now + t.actuator_delayed + t.atm_now +
         t.atm_delayed;
}

double apply_actuator(Actuator actuator, double nu_p_hz, double command_rad, double carrier_hz) {
  if (!(carrier_hz > 0.0)) throw Error(Errc::domain, "carrier frequency must be > 0");
  switch (actuator) {
    case Actuator::none: return 0.0;
    case Actuator::doppler: return -command_rad;
    case Actuator::group_delay: {
      const double tau_c = -command_rad / (kTwoPi * nu_p_hz);
      return kTwoPi * carrier_hz * tau_c;
    }
  }
  return 0.0;
}

std::string_view to_string(LockState s) noexcept {
  switch (s) {
    case LockState::open: return "open";
    case LockState::acquiring: return "acquiring";
    case LockState::locked: return "locked";
    case LockState::saturated: return "saturated";
    case LockState::diverged: return "diverged";
    case LockState::fault: return "fault";
  }
  return "open";
}

LinkState::LinkState(const LinkConfig& config) : config_(config), servo_(config.servo) {
  delay_s_ = config_.one_way_delay_s();
  one_way_ = FractionalDelay::from_seconds(delay_s_, config_.fs_hz);
  round_trip_ = FractionalDelay::from_seconds(2.0 * delay_s_, config_.fs_hz);
  loop_start_ = round_trip_.reach();
  latency_ = config_.settling_samples();
  warmup_ = loop_start_ + one_way_.reach() + latency_;
  actuator_.assign(warmup_ + config_.samples, 0.0);
}

LinkState make_link(const LinkConfig& config) {
  config.validate();
  return LinkState(config);
}

struct LinkStepper {
  static LinkResult run(LinkState& st, const NoiseInputs& in, const RunOptions& options);
};

LinkResult LinkStepper::run(LinkState& st, const NoiseInputs& in, const RunOptions& options) {
  const LinkConfig& cfg = st.config_;
  const std::size_t total = st.input_length();
  const double dt = 1.0 / cfg.fs_hz;
  const double w_p = kTwoPi * cfg.nu_p_hz;
  const double w_s = kTwoPi * cfg.nu_s_hz;
  const auto phi_p = in.phi_p.samples();
  const auto phi_s = in.phi_s.samples();
  const auto tof = in.dt_atm.samples();
  std::span<double> cmd(st.actuator_);
  const auto& rt = st.round_trip_;
  const auto& ow = st.one_way_;

  // Weight of the current command in the error, and whether the delayed
  // actuator pass reads only history.
  double self_weight = 2.0;
  if (!cfg.servo.half_sum_drive) self_weight = rt.whole == 0 ? 2.0 - rt.frac : 1.0;

  LinkResult result{PhaseSeries(std::vector<double>(cfg.samples, 0.0), cfg.fs_hz, 0.0,
                                fmt::format("meas({}, nu_s={:.4g} THz)", to_string(cfg.actuator),
                                            cfg.nu_s_hz * 1e-12)),
                    {},
                    {},
                    st.warmup_};
  auto& meas = result.meas.mutable_samples();
  if (options.record_trace) {
    result.trace.error_rad.assign(cfg.samples, 0.0);
    result.trace.actuator_cmd_rad.assign(cfg.samples, 0.0);
  }

  auto transition = [&](std::size_t n, LockState s) {
    if (st.lock_ == s) return;
    st.lock_ = s;
    result.trace.events.push_back({n, s});
    if (s == LockState::saturated || s == LockState::diverged || s == LockState::fault)
      spdlog::warn("servo {} at sample {} ({})", to_string(s), n, result.meas.label());
    else
      spdlog::debug("servo {} at sample {} ({})", to_string(s), n, result.meas.label());
  };

  const bool active = cfg.servo.enabled && cfg.actuator != Actuator::none;
  bool closed = active;
  double hold = 0.0;
  transition(0, LockState::open);

  for (std::size_t n = 0; n < total; ++n) {
    st.index_ = n;
    double err = 0.0;
    if (n >= st.loop_start_) {
      ErrorTerms terms;
      terms.phi_p_now = phi_p[n];
      terms.phi_p_delayed = rt.read(phi_p, n);
      terms.atm_now = w_p * tof[n];
      terms.atm_delayed = w_p * rt.read(tof, n);
      if (!cfg.servo.half_sum_drive) {
        // history part of the delayed actuator pass; cmd[n] is still zero here
        terms.actuator_delayed = -rt.read(cmd, n);
      }
      const double open_err = error_signal(terms);

      if (closed) {
        if (n == st.loop_start_) transition(n, LockState::acquiring);
        auto& servo = st.servo_;
        // err = open_err - w * u,  u = z + g * err
        err = (open_err - self_weight * servo.zero_error_command()) /
              (1.0 + self_weight * servo.feedthrough_gain(dt));
        cmd[n] = servo.update(err, dt);
        if (servo.faulted()) {
          result.flags.fault = true;
          closed = false;
          hold = cmd[n];
          transition(n, LockState::fault);
        } else if (servo.saturated() && !result.flags.saturated) {
          result.flags.saturated = true;
          transition(n, LockState::saturated);
        } else if (n >= st.loop_start_ + st.latency_ &&
                   std::abs(err) > cfg.servo.divergence_threshold_rad) {
          result.flags.diverged = true;
          closed = false;
          hold = cmd[n];
          transition(n, LockState::diverged);
        } else if (n == st.loop_start_ + st.latency_ && st.lock_ == LockState::acquiring) {
          transition(n, LockState::locked);
        }
      } else {
        cmd[n] = hold;
        err = open_err - self_weight * hold;
      }
    }

    if (n >= st.warmup_) {
      const std::size_t i = n - st.warmup_;
      const double delayed_cmd = ow.read(cmd, n);
      meas[i] = ow.read(phi_s, n) - phi_s[n] + w_s * tof[n] +
                apply_actuator(cfg.actuator, cfg.nu_p_hz, delayed_cmd, cfg.nu_s_hz);
      if (options.record_trace) {
        result.trace.error_rad[i] = err;
        result.trace.actuator_cmd_rad[i] = cmd[n];
      }
    }
  }

  for (auto& e : result.trace.events) e.sample = e.sample >= st.warmup_ ? e.sample - st.warmup_ : 0;
  if (!std::isfinite(meas.empty() ? 0.0 : meas.back())) result.flags.fault = true;
  return result;
}

LinkResult run_link(const LinkConfig& config, const NoiseInputs& inputs, StabilizationMode mode,
                    const RunOptions& options) {
  auto state = make_link(config.for_mode(mode));
  inputs.validate();
  if (inputs.fs_hz() != config.fs_hz)
    throw Error(Errc::input, fmt::format("inputs sampled at {} Hz, config expects {} Hz",
                                         inputs.fs_hz(), config.fs_hz));
  if (inputs.size() < state.input_length())
    throw Error(Errc::input, fmt::format("inputs hold {} samples, run needs {} (warm-up {})",
                                         inputs.size(), state.input_length(), state.warmup()));
  return LinkStepper::run(state, inputs, options);
}

}  // namespace fsolink
