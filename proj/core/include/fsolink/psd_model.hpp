#pragma once

#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fsolink {

enum class PsdKind {
  phase,      // rad^2/Hz
  frequency,  // Hz^2/Hz
};

std::string_view to_string(PsdKind kind) noexcept;
PsdKind psd_kind_from_string(std::string_view name);

// One power-law piece. `level` is the value this piece's power law takes at the
// model's reference frequency, so a piece reads S(f) = level * (f / f_ref)^exponent.
struct PsdSegment {
  double f_break_hz = 0.0;
  double exponent = 0.0;
  double level = 0.0;
};

// Piecewise power-law one-sided PSD. Segment i governs [f_break_i, f_break_{i+1});
// the first segment also governs everything below the second break and the last
// everything above its own break, which is how the model extends outside
// [f_min, f_max] when a caller asks for extended evaluation.
class PsdModel {
 public:
  PsdModel(PsdKind kind, double ref_freq_hz, std::vector<PsdSegment> segments,
           double f_min_hz, double f_max_hz);

  static PsdModel power_law(PsdKind kind, double level_at_ref, double ref_freq_hz,
                            double exponent, double f_min_hz, double f_max_hz);

  // All-zero model, used to switch a noise source off.
  static PsdModel zero(PsdKind kind, double f_min_hz, double f_max_hz);

  // Appends a segment starting at f_break_hz whose level makes the model continuous.
  PsdModel with_break(double f_break_hz, double exponent) const;

  // Returns a copy with every level multiplied by `factor` (> 0, or 0 for silence).
  PsdModel scaled(double factor) const;

  PsdKind kind() const noexcept { return kind_; }
  double ref_freq_hz() const noexcept { return ref_freq_hz_; }
  double f_min_hz() const noexcept { return f_min_hz_; }
  double f_max_hz() const noexcept { return f_max_hz_; }
  const std::vector<PsdSegment>& segments() const noexcept { return segments_; }
  bool is_zero() const noexcept { return zero_; }

  bool in_range(double f_hz) const noexcept { return f_hz >= f_min_hz_ && f_hz <= f_max_hz_; }

  // Range-checked evaluation.
  double operator()(double f_hz) const;

  // Evaluation with power-law extension outside [f_min, f_max]. f must be > 0.
  double eval_extended(double f_hz) const;

 private:
  const PsdSegment& segment_for(double f_hz) const noexcept;

  PsdKind kind_;
  double ref_freq_hz_;
  std::vector<PsdSegment> segments_;
  double f_min_hz_;
  double f_max_hz_;
  bool zero_ = false;
};

double eval_psd(const PsdModel& model, double f_hz);

// S_phi(f) = S_nu(f) / f^2.
PsdModel freq_noise_to_phase_noise(const PsdModel& model);

// Single-sideband convention L(f) = 10 log10(S_phi(f) / 2).
double ssb_phase_noise(double psd_rad2_per_hz);

// Inverse of ssb_phase_noise.
double phase_psd_from_dbc(double l_dbc_per_hz);

void to_json(nlohmann::json& j, const PsdModel& model);
PsdModel psd_model_from_json(const nlohmann::json& j);

}  // namespace fsolink
