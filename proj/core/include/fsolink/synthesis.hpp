#pragma once

#include <cstddef>
#include <cstdint>

#include "fsolink/phase_series.hpp"
#include "fsolink/psd_model.hpp"

namespace fsolink {

inline constexpr std::size_t kMinSynthesisLength = 16;

// Stationary Gaussian phase series whose one-sided PSD is `model`.
//
// White Gaussian noise is shaped in the frequency domain: every positive bin of a
// length-M transform (M >= 2n, a fast FFT size) gets an independent complex
// Gaussian with variance S(f_k) fs M / 2, the inverse transform is taken and the
// first n samples are kept, which suppresses the circular wrap-around of a
// length-n synthesis. DC is zero. The model is evaluated with power-law
// extension outside its valid range (a warning is logged once per call).
// Output is a pure function of (model, fs, n, seed).
PhaseSeries synthesize_phase_noise(const PsdModel& model, double fs_hz, std::size_t n,
                                   std::uint64_t seed);

}  // namespace fsolink
