#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fsolink/link.hpp"
#include "fsolink/spectral.hpp"
#include "fsolink/spectrum.hpp"

namespace fsolink {

// Anchor values the default models are calibrated against (dBc/Hz at anchor_hz).
struct CalibrationAnchors {
  double anchor_hz = 10.0;
  double unstabilized_dbc = -10.5;    // atmosphere at nu_p, loop open
  double stabilized_dbc = -39.9;      // secondary-laser floor with the loop closed
  double quiet_secondary_dbc = -90.0; // primary-laser floor
  double link_length_m = 150.0;
  double atm_exponent = -8.0 / 3.0;
  double atm_rolloff_hz = 50.0;
  double atm_rolloff_exponent = -4.0;
  double primary_flicker_corner_hz = 1.0e3;
  double f_min_hz = 1.0e-3;
  double f_max_hz = 1.0e6;
};

// Stand-in noise models reproducing the anchors through the measurement transfer
// functions at the physical one-way delay: the atmosphere follows a -8/3 power law
// that steepens above atm_rolloff_hz, the secondary laser has white frequency
// noise, and the primary has flicker frequency noise below its corner.
NoiseModels calibrate_default_models(const CalibrationAnchors& anchors = {});

// 190.0 ... 197.2 THz in 0.4 THz steps.
std::vector<double> default_channel_grid_thz();

struct ExperimentSettings {
  std::uint64_t seed = 20210721;
  std::vector<double> channels_thz = default_channel_grid_thz();
  WelchOptions welch{};
  double spot_hz = 10.0;
  double spot_half_width_octaves = 0.25;
  double report_f_max_hz = 1.0e3;
  unsigned threads = 1;
};

// Spot phase noise L(f_target) in dBc/Hz. Bins inside +/- half_width_octaves of the
// target are fitted with a power law (least squares in log-log for the slope), each
// bin is carried to f_target along that slope and the results are averaged
// linearly. With fewer than two bins in the band the value is log-log interpolated
// between the bracketing bins. A band with no power gives -inf.
double spot_phase_noise(const SpectrumEstimate& spectrum, double f_target_hz,
                        double half_width_octaves = 0.25);

inline constexpr std::array<StabilizationMode, 3> kAllModes = {
    StabilizationMode::unstabilized, StabilizationMode::group_delay, StabilizationMode::doppler};

struct ModeResult {
  StabilizationMode mode = StabilizationMode::unstabilized;
  SpectrumEstimate spectrum;
  double spot_dbc = 0.0;
  double suppression_db = 0.0;  // unstabilized spot minus this spot
  RunFlags flags;
};

struct ChannelResult {
  double nu_s_hz = 0.0;
  std::uint64_t seed = 0;
  std::array<ModeResult, 3> modes;  // ordered as kAllModes

  const ModeResult& operator[](StabilizationMode m) const;
  bool flagged() const noexcept;
};

// Which noise sources to synthesize; disabled sources are held at zero.
struct SourceMask {
  bool primary = true;
  bool secondary = true;
  bool atmosphere = true;
};

NoiseInputs make_noise_inputs(const LinkConfig& config, const NoiseModels& models,
                              std::uint64_t seed, const SourceMask& mask = {});

// One channel in all three modes from a single set of noise realizations.
ChannelResult run_three_modes(const LinkConfig& config, const NoiseModels& models,
                              std::uint64_t seed, const ExperimentSettings& settings,
                              const SourceMask& mask = {});

struct SpreadSummary {
  double mean = 0.0;
  double plus = 0.0;   // max - mean
  double minus = 0.0;  // mean - min
};

SpreadSummary summarize(const std::vector<double>& values);

struct ScenarioResult {
  std::vector<ChannelResult> channels;
  std::size_t expected_channels = 0;
  bool incomplete = false;

  bool flagged() const noexcept;
  std::vector<double> spots(StabilizationMode mode) const;
  SpreadSummary summary(StabilizationMode mode) const;
};

std::uint64_t channel_seed(std::uint64_t base_seed, std::size_t channel_index) noexcept;

// Full WDM sweep. Channels run on settings.threads workers; results are merged
// in channel order and do not depend on the thread count.
ScenarioResult channel_sweep(const LinkConfig& base, const NoiseModels& models,
                             const ExperimentSettings& settings, const SourceMask& mask = {});

// Measurement PSD of one mode in the high-gain limit. Unstabilized: secondary term
// plus the single-pass atmosphere scaled to the secondary carrier. Stabilized: the
// primary and secondary terms plus the derived atmospheric residual; group delay
// scales the residual with the carrier, Doppler leaves an extra
// ((nu_s - nu_p) / nu_p)^2 share of the atmosphere uncorrected.
std::vector<double> predicted_mode_psd(const LinkConfig& config, const NoiseModels& models,
                                       StabilizationMode mode, std::span<const double> freqs);

struct ComparisonRow {
  double f_hz = 0.0;
  double simulated = 0.0;
  double predicted = 0.0;
  double deviation_db = 0.0;  // 10 log10(simulated / predicted)
  bool near_null = false;
};

struct Comparison {
  StabilizationMode mode = StabilizationMode::unstabilized;
  std::vector<ComparisonRow> rows;
  double max_abs_deviation_db = 0.0;  // over rows that are not near a null
};

// Bins from ten bin widths up to f_max_hz. Rows within null_guard_bins of a
// multiple of 1/(2T) are marked near_null.
Comparison compare_with_prediction(const SpectrumEstimate& simulated, const LinkConfig& config,
                                   const NoiseModels& models, StabilizationMode mode,
                                   double f_max_hz, std::size_t null_guard_bins = 3);

struct IdentityOptions {
  std::size_t cases = 20;
  std::size_t samples = std::size_t{1} << 20;
  std::size_t segment_len = 8192;
  std::size_t max_delay_samples = 16;
  double tolerance_db = 1.0;
  double null_margin_db = 40.0;  // bins this far below the factor's peak are skipped
  double min_pass_fraction = 0.95;
  std::uint64_t seed = 20210721;
};

struct IdentityCase {
  DelayedCombination combination;
  std::size_t bins_checked = 0;
  double pass_fraction = 0.0;
  double max_abs_deviation_db = 0.0;
  bool passed = false;
};

// Random integer-sample combinations applied to synthesized white noise in the
// time domain; the estimated PSD ratio is checked against combination_factor.
std::vector<IdentityCase> identity_suite(const IdentityOptions& options = {});

}  // namespace fsolink
