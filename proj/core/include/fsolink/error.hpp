#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsolink {

enum class Errc {
  out_of_range,
  invalid_model,
  kind_mismatch,
  too_short,
  invalid_segmentation,
  domain,
  configuration,
  input,
  io,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; the code distinguishes the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

  // True for failures caused by user input (configs, models, arguments), as
  // opposed to faults encountered while running.
  bool is_validation() const noexcept;

 private:
  Errc code_;
};

}  // namespace fsolink
