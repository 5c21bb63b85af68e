#include "fsolink/error.hpp"

namespace fsolink {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::out_of_range: return "out-of-range";
    case Errc::invalid_model: return "invalid-model";
    case Errc::kind_mismatch: return "kind-mismatch";
    case Errc::too_short: return "too-short";
    case Errc::invalid_segmentation: return "invalid-segmentation";
    case Errc::domain: return "domain";
    case Errc::configuration: return "configuration";
    case Errc::input: return "input";
    case Errc::io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

bool Error::is_validation() const noexcept {
  return code_ != Errc::io && code_ != Errc::input;
}

}  // namespace fsolink
