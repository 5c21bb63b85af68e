#include "fsolink/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "fsolink/error.hpp"

namespace fsolink {

namespace {
constexpr double kTwoPiLocal = 2.0 * std::numbers::pi;
}

DelayedCombination::DelayedCombination(std::vector<DelayedTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(Errc::invalid_model, "delayed combination has no terms");
  bool nonzero = false;
  for (const auto& t : terms_) {
    if (!std::isfinite(t.coefficient) || !std::isfinite(t.delay_s))
      throw Error(Errc::invalid_model, "non-finite combination term");
    if (t.delay_s < 0.0) throw Error(Errc::invalid_model, "delays must be >= 0");
    nonzero = nonzero || t.coefficient != 0.0;
  }
  if (!nonzero) throw Error(Errc::invalid_model, "all combination coefficients are zero");
}

double DelayedCombination::bound() const noexcept {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s * s;
}

double combination_factor(const DelayedCombination& comb, double f_hz) {
  if (!(f_hz >= 0.0)) throw Error(Errc::domain, "combination factor needs f >= 0");
  std::complex<double> h{0.0, 0.0};
  for (const auto& t : comb.terms())
    h += t.coefficient * std::polar(1.0, -kTwoPiLocal * f_hz * t.delay_s);
  return std::norm(h);
}

double meas_transfer_secondary(double f_hz, double T_s) {
  return 2.0 - 2.0 * std::cos(kTwoPiLocal * f_hz * T_s);
}

double meas_transfer_primary(double f_hz, double T_s) {
  return 0.5 - 0.5 * std::cos(2.0 * kTwoPiLocal * f_hz * T_s);
}

std::string_view to_string(AtmVariant v) noexcept {
  return v == AtmVariant::printed ? "printed" : "derived";
}

double meas_transfer_atm(double f_hz, double T_s, AtmVariant variant) {
  const double x = kTwoPiLocal * f_hz * T_s;
  if (variant == AtmVariant::printed) return 1.5 - 0.5 * std::cos(x) - std::cos(2.0 * x);
  return combination_factor(atm_combination(T_s), f_hz);
}

DelayedCombination secondary_combination(double T_s) {
  return DelayedCombination({{1.0, T_s}, {-1.0, 0.0}});
}

DelayedCombination primary_combination(double T_s) {
  return DelayedCombination({{0.5, T_s}, {-0.5, 3.0 * T_s}});
}

DelayedCombination atm_combination(double T_s) {
  return DelayedCombination({{1.0, 0.0}, {-0.5, T_s}, {-0.5, 3.0 * T_s}});
}

PredictedCurves predicted_measurement_psd(const NoiseModels& models, double T_s,
                                          std::span<const double> f_grid) {
  PredictedCurves out;
  out.freqs.assign(f_grid.begin(), f_grid.end());
  const std::size_t n = f_grid.size();
  out.primary.resize(n);
  out.secondary.resize(n);
  out.atm_printed.resize(n);
  out.atm_derived.resize(n);
  out.total.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = f_grid[i];
    const double sp = models.primary(f);
    const double ss = models.secondary(f);
    const double sa = models.atmosphere(f);
    out.primary[i] = meas_transfer_primary(f, T_s) * sp;
    out.secondary[i] = meas_transfer_secondary(f, T_s) * ss;
    out.atm_printed[i] = meas_transfer_atm(f, T_s, AtmVariant::printed) * sa;
    out.atm_derived[i] = meas_transfer_atm(f, T_s, AtmVariant::derived) * sa;
    out.total[i] = out.primary[i] + out.secondary[i] + out.atm_derived[i];
  }
  return out;
}

double atm_low_frequency_ratio_db() noexcept { return 10.0 * std::log10(4.0 / 2.25); }

std::vector<DiscrepancyRow> atm_variant_report(double T_s, std::span<const double> f_grid) {
  std::vector<DiscrepancyRow> rows;
  rows.reserve(f_grid.size());
  for (double f : f_grid) {
    DiscrepancyRow r;
    r.f_hz = f;
    r.printed = meas_transfer_atm(f, T_s, AtmVariant::printed);
    r.derived = meas_transfer_atm(f, T_s, AtmVariant::derived);
    // Both vanish quadratically at integer fT; use the Taylor ratio there.
    const double phase = std::remainder(f * T_s, 1.0);
    if (std::abs(phase) < 1e-6)
      r.ratio_db = atm_low_frequency_ratio_db();
    else
      r.ratio_db = 10.0 * std::log10(r.derived / r.printed);
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> log_grid(double f_lo_hz, double f_hi_hz, std::size_t points) {
  if (!(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz) || points < 2)
    throw Error(Errc::domain, "log grid needs 0 < f_lo < f_hi and >= 2 points");
  std::vector<double> g(points);
  const double a = std::log(f_lo_hz);
  const double b = std::log(f_hi_hz);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  g.front() = f_lo_hz;
  g.back() = f_hi_hz;
  return g;
}

}  // namespace fsolink
