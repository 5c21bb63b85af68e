#include "fsolink/psd_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fsolink/error.hpp"

namespace fsolink {

namespace {

constexpr double kContinuityTolerance = 1e-6;

double piece(const PsdSegment& s, double ref, double f) {
  return s.level * std::pow(f / ref, s.exponent);
}

}  // namespace

std::string_view to_string(PsdKind kind) noexcept {
  return kind == PsdKind::phase ? "phase" : "frequency";
}

PsdKind psd_kind_from_string(std::string_view name) {
  if (name == "phase" || name == "phase-noise") return PsdKind::phase;
  if (name == "frequency" || name == "frequency-noise") return PsdKind::frequency;
  throw Error(Errc::invalid_model, fmt::format("unknown PSD kind '{}'", name));
}

PsdModel::PsdModel(PsdKind kind, double ref_freq_hz, std::vector<PsdSegment> segments,
                   double f_min_hz, double f_max_hz)
    : kind_(kind),
      ref_freq_hz_(ref_freq_hz),
      segments_(std::move(segments)),
      f_min_hz_(f_min_hz),
      f_max_hz_(f_max_hz) {
  if (segments_.empty()) throw Error(Errc::invalid_model, "empty segment list");
  if (!(ref_freq_hz_ > 0.0) || !std::isfinite(ref_freq_hz_))
    throw Error(Errc::invalid_model, "ref_freq_hz must be positive");
  if (!(f_min_hz_ >= 0.0) || !(f_max_hz_ > f_min_hz_) || !std::isfinite(f_max_hz_))
    throw Error(Errc::invalid_model,
                fmt::format("invalid valid_range [{}, {}]", f_min_hz_, f_max_hz_));

  std::size_t zeros = 0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.level) || !std::isfinite(s.exponent) || !std::isfinite(s.f_break_hz))
      throw Error(Errc::invalid_model, fmt::format("segment {} has non-finite fields", i));
    if (s.level < 0.0) throw Error(Errc::invalid_model, fmt::format("segment {} level < 0", i));
    if (s.level == 0.0) ++zeros;
    if (i > 0 && !(s.f_break_hz > segments_[i - 1].f_break_hz))
      throw Error(Errc::invalid_model, "segment breaks must be strictly increasing");
  }
  if (zeros != 0 && zeros != segments_.size())
    throw Error(Errc::invalid_model, "a model is either silent or strictly positive");
  zero_ = zeros == segments_.size();

  if (!zero_) {
    for (std::size_t i = 1; i < segments_.size(); ++i) {
      const double fb = segments_[i].f_break_hz;
      if (!(fb > 0.0)) throw Error(Errc::invalid_model, "interior breaks must be positive");
      const double below = piece(segments_[i - 1], ref_freq_hz_, fb);
      const double above = piece(segments_[i], ref_freq_hz_, fb);
      if (std::abs(above - below) > kContinuityTolerance * below)
        throw Error(Errc::invalid_model,
                    fmt::format("model discontinuous at {} Hz ({} vs {})", fb, below, above));
    }
  }
}

PsdModel PsdModel::power_law(PsdKind kind, double level_at_ref, double ref_freq_hz,
                             double exponent, double f_min_hz, double f_max_hz) {
  return PsdModel(kind, ref_freq_hz, {{0.0, exponent, level_at_ref}}, f_min_hz, f_max_hz);
}

PsdModel PsdModel::zero(PsdKind kind, double f_min_hz, double f_max_hz) {
  return PsdModel(kind, 1.0, {{0.0, 0.0, 0.0}}, f_min_hz, f_max_hz);
}

PsdModel PsdModel::with_break(double f_break_hz, double exponent) const {
  auto segs = segments_;
  const auto& last = segs.back();
  const double value = piece(last, ref_freq_hz_, f_break_hz);
  const double level = value / std::pow(f_break_hz / ref_freq_hz_, exponent);
  segs.push_back({f_break_hz, exponent, zero_ ? 0.0 : level});
  return PsdModel(kind_, ref_freq_hz_, std::move(segs), f_min_hz_, f_max_hz_);
}

PsdModel PsdModel::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw Error(Errc::invalid_model, "scale factor must be finite and >= 0");
  auto segs = segments_;
  for (auto& s : segs) s.level *= factor;
  return PsdModel(kind_, ref_freq_hz_, std::move(segs), f_min_hz_, f_max_hz_);
}

const PsdSegment& PsdModel::segment_for(double f_hz) const noexcept {
  // upper_bound over breaks, skipping the first segment's (informational) break
  auto it = std::upper_bound(segments_.begin() + 1, segments_.end(), f_hz,
                             [](double f, const PsdSegment& s) { return f < s.f_break_hz; });
  return *(it - 1);
}

double PsdModel::operator()(double f_hz) const {
  if (!in_range(f_hz))
    throw Error(Errc::out_of_range,
                fmt::format("f = {} Hz outside [{}, {}]", f_hz, f_min_hz_, f_max_hz_));
  return eval_extended(f_hz);
}

double PsdModel::eval_extended(double f_hz) const {
  if (zero_) return 0.0;
  if (!(f_hz > 0.0)) throw Error(Errc::out_of_range, "power-law PSD undefined at f <= 0");
  return piece(segment_for(f_hz), ref_freq_hz_, f_hz);
}

double eval_psd(const PsdModel& model, double f_hz) { return model(f_hz); }

PsdModel freq_noise_to_phase_noise(const PsdModel& model) {
  if (model.kind() != PsdKind::frequency)
    throw Error(Errc::kind_mismatch, "freq_noise_to_phase_noise needs a frequency-noise model");
  if (!(model.f_min_hz() > 0.0))
    throw Error(Errc::invalid_model, "frequency 0 must be excluded from the valid range");
  const double ref = model.ref_freq_hz();
  auto segs = model.segments();
  for (auto& s : segs) {
    s.exponent -= 2.0;
    s.level /= ref * ref;
  }
  return PsdModel(PsdKind::phase, ref, std::move(segs), model.f_min_hz(), model.f_max_hz());
}

double ssb_phase_noise(double psd_rad2_per_hz) {
  if (!(psd_rad2_per_hz > 0.0))
    throw Error(Errc::domain, fmt::format("L(f) undefined for S_phi = {}", psd_rad2_per_hz));
  return 10.0 * std::log10(psd_rad2_per_hz / 2.0);
}

double phase_psd_from_dbc(double l_dbc_per_hz) {
  if (!std::isfinite(l_dbc_per_hz)) throw Error(Errc::domain, "non-finite dBc/Hz value");
  return 2.0 * std::pow(10.0, l_dbc_per_hz / 10.0);
}

void to_json(nlohmann::json& j, const PsdModel& model) {
  auto segs = nlohmann::json::array();
  for (const auto& s : model.segments())
    segs.push_back({{"f_break_hz", s.f_break_hz}, {"exponent", s.exponent}, {"level", s.level}});
  j = {{"kind", std::string(to_string(model.kind()))},
       {"ref_freq_hz", model.ref_freq_hz()},
       {"segments", segs},
       {"f_min_hz", model.f_min_hz()},
       {"f_max_hz", model.f_max_hz()}};
}

PsdModel psd_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::invalid_model, "PSD model must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "ref_freq_hz" && key != "segments" && key != "f_min_hz" &&
        key != "f_max_hz")
      throw Error(Errc::invalid_model, fmt::format("unknown key '{}' in PSD model", key));
  }
  for (const char* key : {"kind", "ref_freq_hz", "segments", "f_min_hz", "f_max_hz"})
    if (!j.contains(key))
      throw Error(Errc::invalid_model, fmt::format("missing key '{}' in PSD model", key));

  const auto kind = psd_kind_from_string(j.at("kind").get<std::string>());
  const double ref = j.at("ref_freq_hz").get<double>();
  const auto& jsegs = j.at("segments");
  if (!jsegs.is_array() || jsegs.empty()) throw Error(Errc::invalid_model, "empty segment list");

  std::vector<PsdSegment> segs;
  for (std::size_t i = 0; i < jsegs.size(); ++i) {
    const auto& js = jsegs[i];
    for (const auto& [key, _] : js.items())
      if (key != "f_break_hz" && key != "exponent" && key != "level")
        throw Error(Errc::invalid_model, fmt::format("unknown key '{}' in segment {}", key, i));
    PsdSegment s;
    s.f_break_hz = js.value("f_break_hz", 0.0);
    if (!js.contains("exponent"))
      throw Error(Errc::invalid_model, fmt::format("segment {} missing 'exponent'", i));
    s.exponent = js.at("exponent").get<double>();
    if (js.contains("level")) {
      s.level = js.at("level").get<double>();
    } else if (i == 0) {
      throw Error(Errc::invalid_model, "first segment needs a 'level'");
    } else {
      // continuity fixes the level of later segments
      const auto& prev = segs.back();
      const double v = piece(prev, ref, s.f_break_hz);
      s.level = v / std::pow(s.f_break_hz / ref, s.exponent);
    }
    segs.push_back(s);
  }
  return PsdModel(kind, ref, std::move(segs), j.at("f_min_hz").get<double>(),
                  j.at("f_max_hz").get<double>());
}

}  // namespace fsolink
