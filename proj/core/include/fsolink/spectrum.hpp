#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fsolink/phase_series.hpp"

namespace fsolink {

enum class Window { hann, rectangular };

std::string_view to_string(Window w) noexcept;
Window window_from_string(std::string_view name);

// Periodic taper of length n.
std::vector<double> make_window(Window w, std::size_t n);

// Equivalent noise bandwidth in bins: n * sum(w^2) / sum(w)^2 (1.5 for Hann).
double window_enbw_bins(Window w, std::size_t n);

struct WelchOptions {
  std::size_t segment_len = 65536;
  double overlap = 0.5;
  Window window = Window::hann;
  bool remove_mean = true;  // per-segment mean removal before tapering
};

// One-sided averaged-periodogram estimate. Bin 0 is DC and, for even segment
// lengths, the last bin is Nyquist; neither is doubled.
struct SpectrumEstimate {
  std::vector<double> freqs;  // Hz
  std::vector<double> psd;    // units^2 / Hz
  std::size_t n_averages = 0;
  double resolution_bw = 0.0;  // bin spacing times window ENBW, Hz
  double bin_width = 0.0;      // fs / segment_len, Hz
  bool has_dc = true;
  bool has_nyquist = false;

  std::size_t size() const noexcept { return freqs.size(); }
  bool is_edge_bin(std::size_t i) const noexcept {
    return (has_dc && i == 0) || (has_nyquist && i + 1 == freqs.size());
  }
  // Sum of psd * bin_width over all bins.
  double integrated_power() const noexcept;
};

SpectrumEstimate estimate_psd(const PhaseSeries& series, const WelchOptions& options);

SpectrumEstimate estimate_psd(const PhaseSeries& series, std::size_t segment_len,
                              double overlap = 0.5, Window window = Window::hann);

}  // namespace fsolink
