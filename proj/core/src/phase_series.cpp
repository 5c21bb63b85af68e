#include "fsolink/phase_series.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fsolink/error.hpp"

namespace fsolink {

PhaseSeries::PhaseSeries(std::vector<double> samples, double fs_hz, double t0_s, std::string label)
    : samples_(std::move(samples)), fs_hz_(fs_hz), t0_s_(t0_s), label_(std::move(label)) {
  validate();
}

void PhaseSeries::validate() const {
  if (!(fs_hz_ > 0.0) || !std::isfinite(fs_hz_))
    throw Error(Errc::input, fmt::format("series '{}': sample rate must be > 0", label_));
  if (samples_.size() < 2)
    throw Error(Errc::input, fmt::format("series '{}': need at least 2 samples", label_));
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (!std::isfinite(samples_[i]))
      throw Error(Errc::input, fmt::format("series '{}': non-finite sample at {}", label_, i));
}

}  // namespace fsolink
