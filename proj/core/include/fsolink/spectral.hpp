#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fsolink/psd_model.hpp"

namespace fsolink {

struct DelayedTerm {
  double coefficient = 0.0;
  double delay_s = 0.0;
};

// y(t) = sum_k c_k x(t - tau_k). For x with PSD S(f), y has PSD |H(f)|^2 S(f)
// with H(f) = sum_k c_k exp(-i 2 pi f tau_k).
class DelayedCombination {
 public:
  explicit DelayedCombination(std::vector<DelayedTerm> terms);

  const std::vector<DelayedTerm>& terms() const noexcept { return terms_; }
  // (sum |c_k|)^2, the bound on the factor.
  double bound() const noexcept;

 private:
  std::vector<DelayedTerm> terms_;
};

double combination_factor(const DelayedCombination& comb, double f_hz);

// 2 - 2 cos(2 pi f T): secondary laser, delayed once against itself.
double meas_transfer_secondary(double f_hz, double T_s);

// 1/2 - 1/2 cos(4 pi f T): primary laser, halved and seen at T and 3T.
double meas_transfer_primary(double f_hz, double T_s);

enum class AtmVariant {
  printed,  // 3/2 - 1/2 cos(2 pi f T) - cos(4 pi f T)
  derived,  // |1 - 1/2 e^{-i 2 pi f T} - 1/2 e^{-i 6 pi f T}|^2, from the time-domain chain
};

std::string_view to_string(AtmVariant v) noexcept;

double meas_transfer_atm(double f_hz, double T_s, AtmVariant variant);

// Coefficient sets read off the stabilized measurement phase.
DelayedCombination secondary_combination(double T_s);
DelayedCombination primary_combination(double T_s);
DelayedCombination atm_combination(double T_s);

struct NoiseModels {
  PsdModel primary;     // phase noise of the primary laser
  PsdModel secondary;   // phase noise of the secondary laser
  PsdModel atmosphere;  // atmospheric phase noise at the primary carrier
};

struct PredictedCurves {
  std::vector<double> freqs;
  std::vector<double> primary;
  std::vector<double> secondary;
  std::vector<double> atm_printed;
  std::vector<double> atm_derived;
  std::vector<double> total;  // primary + secondary + atm_derived
};

// Throws Errc::out_of_range if any grid point lies outside a model's valid range.
PredictedCurves predicted_measurement_psd(const NoiseModels& models, double T_s,
                                          std::span<const double> f_grid);

struct DiscrepancyRow {
  double f_hz = 0.0;
  double printed = 0.0;
  double derived = 0.0;
  double ratio_db = 0.0;  // 10 log10(derived / printed); the f -> 0 limit at f = 0
};

// Limit of derived/printed as f -> 0: Taylor coefficients 4 and 9/4.
double atm_low_frequency_ratio_db() noexcept;

std::vector<DiscrepancyRow> atm_variant_report(double T_s, std::span<const double> f_grid);

// Log-spaced grid, inclusive endpoints.
std::vector<double> log_grid(double f_lo_hz, double f_hi_hz, std::size_t points);

}  // namespace fsolink
