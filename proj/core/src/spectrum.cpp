#include "fsolink/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "fsolink/error.hpp"
#include "fsolink/fft.hpp"

namespace fsolink {

std::string_view to_string(Window w) noexcept {
  return w == Window::hann ? "hann" : "rectangular";
}

Window window_from_string(std::string_view name) {
  if (name == "hann" || name == "hanning") return Window::hann;
  if (name == "rectangular" || name == "boxcar" || name == "none") return Window::rectangular;
  throw Error(Errc::configuration, fmt::format("unknown window '{}'", name));
}

std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::hann) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
  }
  return out;
}

double window_enbw_bins(Window w, std::size_t n) {
  const auto win = make_window(w, n);
  const double s1 = std::accumulate(win.begin(), win.end(), 0.0);
  const double s2 = std::inner_product(win.begin(), win.end(), win.begin(), 0.0);
  return static_cast<double>(n) * s2 / (s1 * s1);
}

double SpectrumEstimate::integrated_power() const noexcept {
  return std::accumulate(psd.begin(), psd.end(), 0.0) * bin_width;
}

SpectrumEstimate estimate_psd(const PhaseSeries& series, const WelchOptions& options) {
  const std::size_t n = options.segment_len;
  const std::size_t len = series.size();
  if (n < 4) throw Error(Errc::invalid_segmentation, "segment length must be >= 4");
  if (n > len)
    throw Error(Errc::invalid_segmentation,
                fmt::format("segment length {} exceeds series length {}", n, len));
  if (!(options.overlap >= 0.0 && options.overlap <= 0.9))
    throw Error(Errc::invalid_segmentation,
                fmt::format("overlap {} outside [0, 0.9]", options.overlap));

  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - options.overlap))));
  const std::size_t segments = 1 + (len - n) / step;
  const auto win = make_window(options.window, n);
  const double win_power = std::inner_product(win.begin(), win.end(), win.begin(), 0.0);
  const double fs = series.fs_hz();

  RealFft fft(n);
  const std::size_t bins = n / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  const auto x = series.samples();
  auto buf = fft.real();
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t start = s * step;
    double mean = 0.0;
    if (options.remove_mean) {
      for (std::size_t i = 0; i < n; ++i) mean += x[start + i];
      mean /= static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) buf[i] = (x[start + i] - mean) * win[i];
    fft.forward();
    const auto spec = fft.spectrum();
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
  }

  SpectrumEstimate est;
  est.has_dc = true;
  est.has_nyquist = n % 2 == 0;
  est.n_averages = segments;
  est.bin_width = fs / static_cast<double>(n);
  est.resolution_bw = est.bin_width * window_enbw_bins(options.window, n);
  est.freqs.resize(bins);
  est.psd.resize(bins);
  const double norm = 1.0 / (fs * win_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    est.freqs[k] = static_cast<double>(k) * est.bin_width;
    const bool doubled = k != 0 && !(est.has_nyquist && k == bins - 1);
    est.psd[k] = acc[k] * norm * (doubled ? 2.0 : 1.0);
  }
  return est;
}

SpectrumEstimate estimate_psd(const PhaseSeries& series, std::size_t segment_len, double overlap,
                              Window window) {
  WelchOptions o;
  o.segment_len = segment_len;
  o.overlap = overlap;
  o.window = window;
  return estimate_psd(series, o);
}

}  // namespace fsolink
