#include "fsolink/synthesis.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fsolink/error.hpp"
#include "fsolink/fft.hpp"
#include "fsolink/random.hpp"

namespace fsolink {

PhaseSeries synthesize_phase_noise(const PsdModel& model, double fs_hz, std::size_t n,
                                   std::uint64_t seed) {
  if (n < kMinSynthesisLength)
    throw Error(Errc::too_short, fmt::format("n = {} < {}", n, kMinSynthesisLength));
  if (!(fs_hz > 0.0) || !std::isfinite(fs_hz))
    throw Error(Errc::domain, "sample rate must be positive");
  if (model.kind() != PsdKind::phase)
    throw Error(Errc::kind_mismatch, "synthesis needs a phase-noise model");

  auto label = fmt::format("synth(seed={})", seed);
  if (model.is_zero()) return PhaseSeries(std::vector<double>(n, 0.0), fs_hz, 0.0, label);

  std::size_t m = next_fast_len(2 * n);
  if (m % 2 != 0) m = next_fast_len(m + 1);
  const double df = fs_hz / static_cast<double>(m);
  if (df < model.f_min_hz() || fs_hz / 2.0 > model.f_max_hz())
    spdlog::warn("synthesis band [{:.4g}, {:.4g}] Hz exceeds model range [{:.4g}, {:.4g}] Hz; "
                 "extending end slopes",
                 df, fs_hz / 2.0, model.f_min_hz(), model.f_max_hz());

  RealFft fft(m);
  auto spec = fft.spectrum();
  Rng rng(seed);
  const std::size_t half = m / 2;
  const double scale = fs_hz * static_cast<double>(m) / 4.0;
  spec[0] = 0.0;
  for (std::size_t k = 1; k < half; ++k) {
    const double sigma = std::sqrt(model.eval_extended(static_cast<double>(k) * df) * scale);
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    spec[k] = {sigma * re, sigma * im};
  }
  // Nyquist bin is real and carries twice the per-component variance.
  spec[half] = std::sqrt(model.eval_extended(static_cast<double>(half) * df) * 4.0 * scale) *
               rng.gaussian();
  fft.inverse();

  const auto real = fft.real();
  const double norm = 1.0 / static_cast<double>(m);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = real[i] * norm;
  return PhaseSeries(std::move(out), fs_hz, 0.0, std::move(label));
}

}  // namespace fsolink
