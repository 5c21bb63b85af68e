#include "fsolink/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fsolink/error.hpp"
#include "fsolink/random.hpp"
#include "fsolink/synthesis.hpp"

namespace fsolink {

NoiseModels calibrate_default_models(const CalibrationAnchors& a) {
  const double T = a.link_length_m / kSpeedOfLight;
  const double f0 = a.anchor_hz;

  auto atmosphere = PsdModel::power_law(PsdKind::phase, phase_psd_from_dbc(a.unstabilized_dbc),
                                        f0, a.atm_exponent, a.f_min_hz, a.f_max_hz)
                        .with_break(a.atm_rolloff_hz, a.atm_rolloff_exponent);

  const double s_phi_s = phase_psd_from_dbc(a.stabilized_dbc) / meas_transfer_secondary(f0, T);
  auto secondary = freq_noise_to_phase_noise(
      PsdModel::power_law(PsdKind::frequency, s_phi_s * f0 * f0, f0, 0.0, a.f_min_hz, a.f_max_hz));

  const double s_phi_p = phase_psd_from_dbc(a.quiet_secondary_dbc) / meas_transfer_primary(f0, T);
  auto primary = freq_noise_to_phase_noise(
      PsdModel::power_law(PsdKind::frequency, s_phi_p * f0 * f0, f0, -1.0, a.f_min_hz, a.f_max_hz)
          .with_break(a.primary_flicker_corner_hz, 0.0));

  return {std::move(primary), std::move(secondary), std::move(atmosphere)};
}

std::vector<double> default_channel_grid_thz() {
  std::vector<double> g;
  for (int k = 0; k < 19; ++k) g.push_back((1900.0 + 4.0 * k) / 10.0);
  return g;
}

double spot_phase_noise(const SpectrumEstimate& s, double f_target_hz, double half_width_octaves) {
  if (s.size() < 3) throw Error(Errc::out_of_range, "spectrum too short for a spot value");
  const std::size_t first = s.has_dc ? 1 : 0;
  const std::size_t last = s.has_nyquist ? s.size() - 2 : s.size() - 1;
  if (!(f_target_hz >= s.freqs[first] && f_target_hz <= s.freqs[last]))
    throw Error(Errc::out_of_range,
                fmt::format("spot frequency {} Hz outside [{}, {}] Hz", f_target_hz,
                            s.freqs[first], s.freqs[last]));
  if (!(half_width_octaves >= 0.0)) throw Error(Errc::domain, "band half-width must be >= 0");

  const double lo = f_target_hz * std::exp2(-half_width_octaves);
  const double hi = f_target_hz * std::exp2(half_width_octaves);
  std::vector<double> lx, ly, fx, py;
  for (std::size_t i = first; i <= last; ++i) {
    const double f = s.freqs[i];
    if (f < lo || f > hi || !(s.psd[i] > 0.0)) continue;
    lx.push_back(std::log(f));
    ly.push_back(std::log(s.psd[i]));
    fx.push_back(f);
    py.push_back(s.psd[i]);
  }

  double value = 0.0;
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    for (std::size_t i = 0; i < fx.size(); ++i) value += py[i] * std::pow(f_target_hz / fx[i], slope);
    value /= static_cast<double>(fx.size());
  } else {
    auto it = std::lower_bound(s.freqs.begin() + static_cast<std::ptrdiff_t>(first),
                               s.freqs.begin() + static_cast<std::ptrdiff_t>(last) + 1, f_target_hz);
    auto k = static_cast<std::size_t>(it - s.freqs.begin());
    if (s.freqs[k] == f_target_hz) {
      value = s.psd[k];
    } else {
      const double f1 = s.freqs[k - 1], f2 = s.freqs[k];
      const double p1 = s.psd[k - 1], p2 = s.psd[k];
      if (!(p1 > 0.0) || !(p2 > 0.0)) {
        value = p1 + (p2 - p1) * (f_target_hz - f1) / (f2 - f1);
      } else {
        const double t = std::log(f_target_hz / f1) / std::log(f2 / f1);
        value = std::exp(std::log(p1) + t * (std::log(p2) - std::log(p1)));
      }
    }
  }
  return value > 0.0 ? ssb_phase_noise(value) : -std::numeric_limits<double>::infinity();
}

const ModeResult& ChannelResult::operator[](StabilizationMode m) const {
  for (const auto& r : modes)
    if (r.mode == m) return r;
  throw Error(Errc::input, "mode missing from channel result");
}

bool ChannelResult::flagged() const noexcept {
  return std::any_of(modes.begin(), modes.end(), [](const ModeResult& r) { return r.flags.any(); });
}

NoiseInputs make_noise_inputs(const LinkConfig& config, const NoiseModels& models,
                              std::uint64_t seed, const SourceMask& mask) {
  const std::size_t n = make_link(config).input_length();
  const double fs = config.fs_hz;
  auto zeros = [&](const char* label) {
    return PhaseSeries(std::vector<double>(n, 0.0), fs, 0.0, label);
  };
  return {mask.primary ? synthesize_phase_noise(models.primary, fs, n, derive_seed(seed, {1}))
                       : zeros("phi_p"),
          mask.secondary ? synthesize_phase_noise(models.secondary, fs, n, derive_seed(seed, {2}))
                         : zeros("phi_s"),
          mask.atmosphere
              ? atmosphere_from_psd(models.atmosphere, config.nu_p_hz, fs, n, derive_seed(seed, {3}))
              : zeros("dT_atm")};
}

ChannelResult run_three_modes(const LinkConfig& config, const NoiseModels& models,
                              std::uint64_t seed, const ExperimentSettings& settings,
                              const SourceMask& mask) {
  const auto inputs = make_noise_inputs(config, models, seed, mask);
  ChannelResult out;
  out.nu_s_hz = config.nu_s_hz;
  out.seed = seed;
  for (std::size_t i = 0; i < kAllModes.size(); ++i) {
    auto run = run_link(config, inputs, kAllModes[i], RunOptions{.record_trace = false});
    auto& m = out.modes[i];
    m.mode = kAllModes[i];
    m.flags = run.flags;
    m.spectrum = estimate_psd(run.meas, settings.welch);
    m.spot_dbc = spot_phase_noise(m.spectrum, settings.spot_hz, settings.spot_half_width_octaves);
  }
  const double reference = out.modes[0].spot_dbc;
  for (auto& m : out.modes) m.suppression_db = reference - m.spot_dbc;
  return out;
}

SpreadSummary summarize(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return {mean, *mx - mean, mean - *mn};
}

bool ScenarioResult::flagged() const noexcept {
  return incomplete || std::any_of(channels.begin(), channels.end(),
                                   [](const ChannelResult& c) { return c.flagged(); });
}

std::vector<double> ScenarioResult::spots(StabilizationMode mode) const {
  std::vector<double> v;
  v.reserve(channels.size());
  for (const auto& c : channels) v.push_back(c[mode].spot_dbc);
  return v;
}

SpreadSummary ScenarioResult::summary(StabilizationMode mode) const {
  return summarize(spots(mode));
}

std::uint64_t channel_seed(std::uint64_t base_seed, std::size_t channel_index) noexcept {
  return derive_seed(base_seed, {0xC4A7ULL, static_cast<std::uint64_t>(channel_index)});
}

ScenarioResult channel_sweep(const LinkConfig& base, const NoiseModels& models,
                             const ExperimentSettings& settings, const SourceMask& mask) {
  const std::size_t count = settings.channels_thz.size();
  std::vector<std::optional<ChannelResult>> slots(count);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      LinkConfig cfg = base;
      cfg.nu_s_hz = settings.channels_thz[i] * 1e12;
      try {
        slots[i] = run_three_modes(cfg, models, channel_seed(settings.seed, i), settings, mask);
      } catch (const Error& e) {
        std::lock_guard lock(log_mutex);
        spdlog::error("channel {:.1f} THz failed: {}", settings.channels_thz[i], e.what());
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(settings.threads,
                                                           static_cast<unsigned>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ScenarioResult result;
  result.expected_channels = count;
  for (auto& s : slots) {
    if (s) result.channels.push_back(std::move(*s));
    else result.incomplete = true;
  }
  return result;
}

std::vector<double> predicted_mode_psd(const LinkConfig& config, const NoiseModels& models,
                                       StabilizationMode mode, std::span<const double> freqs) {
  const double T = config.one_way_delay_s();
  const double ratio = config.nu_s_hz / config.nu_p_hz;
  const double offset = (config.nu_s_hz - config.nu_p_hz) / config.nu_p_hz;
  std::vector<double> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double f = freqs[i];
    const double sa = models.atmosphere(f);
    const double secondary = meas_transfer_secondary(f, T) * models.secondary(f);
    if (mode == StabilizationMode::unstabilized) {
      out[i] = secondary + ratio * ratio * sa;
      continue;
    }
    const double residual = meas_transfer_atm(f, T, AtmVariant::derived) * sa;
    out[i] = secondary + meas_transfer_primary(f, T) * models.primary(f) +
             (mode == StabilizationMode::group_delay ? ratio * ratio * residual
                                                     : residual + offset * offset * sa);
  }
  return out;
}

Comparison compare_with_prediction(const SpectrumEstimate& sim, const LinkConfig& config,
                                   const NoiseModels& models, StabilizationMode mode,
                                   double f_max_hz, std::size_t null_guard_bins) {
  Comparison out;
  out.mode = mode;
  const double f_lo = 10.0 * sim.bin_width;
  std::vector<double> freqs, psd;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (sim.is_edge_bin(i) || sim.freqs[i] < f_lo || sim.freqs[i] > f_max_hz) continue;
    freqs.push_back(sim.freqs[i]);
    psd.push_back(sim.psd[i]);
  }
  const auto pred = predicted_mode_psd(config, models, mode, freqs);
  const double null_spacing = 1.0 / (2.0 * config.one_way_delay_s());
  const double guard = static_cast<double>(null_guard_bins) * sim.bin_width;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    ComparisonRow r{freqs[i], psd[i], pred[i], 10.0 * std::log10(psd[i] / pred[i]), false};
    const double k = std::round(freqs[i] / null_spacing);
    r.near_null = k >= 1.0 && std::abs(freqs[i] - k * null_spacing) <= guard;
    if (!r.near_null && std::isfinite(r.deviation_db))
      out.max_abs_deviation_db = std::max(out.max_abs_deviation_db, std::abs(r.deviation_db));
    out.rows.push_back(r);
  }
  return out;
}

std::vector<IdentityCase> identity_suite(const IdentityOptions& o) {
  if (o.cases == 0) throw Error(Errc::domain, "identity suite needs at least one case");
  const std::size_t pad = o.max_delay_samples;
  const double fs = 1.0;
  const auto white = PsdModel::power_law(PsdKind::phase, 1.0, 0.1, 0.0, 1e-9, 1.0);
  Rng rng(derive_seed(o.seed, {0x1DE7ULL}));

  std::vector<IdentityCase> cases;
  for (std::size_t c = 0; c < o.cases; ++c) {
    const std::size_t nterms = 2 + static_cast<std::size_t>(rng.uniform() * 3.0);
    std::vector<DelayedTerm> terms;
    std::vector<std::size_t> used;
    while (terms.size() < nterms) {
      const auto d = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pad + 1));
      if (std::find(used.begin(), used.end(), d) != used.end()) continue;
      double coef = 2.0 * rng.uniform() - 1.0;
      if (std::abs(coef) < 0.1) coef = std::copysign(0.1, coef);
      used.push_back(d);
      terms.push_back({coef, static_cast<double>(d) / fs});
    }
    DelayedCombination comb(terms);

    const auto x = synthesize_phase_noise(white, fs, o.samples + pad, derive_seed(o.seed, {c, 7}));
    std::vector<double> xs(o.samples), ys(o.samples, 0.0);
    for (std::size_t n = 0; n < o.samples; ++n) {
      xs[n] = x[n + pad];
      for (std::size_t k = 0; k < terms.size(); ++k) ys[n] += terms[k].coefficient * x[n + pad - used[k]];
    }
    const WelchOptions w{o.segment_len, 0.5, Window::hann, true};
    const auto sx = estimate_psd(PhaseSeries(std::move(xs), fs), w);
    const auto sy = estimate_psd(PhaseSeries(std::move(ys), fs), w);

    double peak = 0.0;
    std::vector<double> h(sx.size());
    for (std::size_t i = 0; i < sx.size(); ++i) peak = std::max(peak, h[i] = combination_factor(comb, sx.freqs[i]));
    const double floor = peak * std::pow(10.0, -o.null_margin_db / 10.0);

    IdentityCase ic{comb};
    std::size_t ok = 0;
    for (std::size_t i = 0; i < sx.size(); ++i) {
      if (sx.is_edge_bin(i) || h[i] < floor) continue;
      const double dev = 10.0 * std::log10(sy.psd[i] / sx.psd[i] / h[i]);
      ++ic.bins_checked;
      ok += std::abs(dev) <= o.tolerance_db ? 1 : 0;
      ic.max_abs_deviation_db = std::max(ic.max_abs_deviation_db, std::abs(dev));
    }
    ic.pass_fraction = ic.bins_checked ? static_cast<double>(ok) / static_cast<double>(ic.bins_checked) : 0.0;
    ic.passed = ic.bins_checked > 0 && ic.pass_fraction >= o.min_pass_fraction;
    cases.push_back(std::move(ic));
  }
  return cases;
}

}  // namespace fsolink
