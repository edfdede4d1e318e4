#pragma once

#include <stdexcept>
#include <string>

namespace aerosynth {

enum class ErrorCode {
  invalid_fov,
  out_of_range,
  severity_range,
  rejection_exhausted,
  unknown_id,
  empty_mask,
  box_out_of_bounds,
  invalid_targets,
  generation_failed,
  layout_invalid,
  empty_stratum,
  config_parse,
  io,
  validation_failed,
};

const char* to_string(ErrorCode code);

/// Every failure the library raises carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aerosynth
