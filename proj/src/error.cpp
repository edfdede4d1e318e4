#include "aerosynth/error.hpp"

namespace aerosynth {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_fov: return "INVALID_FOV";
    case ErrorCode::out_of_range: return "OUT_OF_RANGE";
    case ErrorCode::severity_range: return "SEVERITY_RANGE";
    case ErrorCode::rejection_exhausted: return "REJECTION_EXHAUSTED";
    case ErrorCode::unknown_id: return "UNKNOWN_ID";
    case ErrorCode::empty_mask: return "EMPTY_MASK";
    case ErrorCode::box_out_of_bounds: return "BOX_OUT_OF_BOUNDS";
    case ErrorCode::invalid_targets: return "INVALID_TARGETS";
    case ErrorCode::generation_failed: return "GENERATION_FAILED";
    case ErrorCode::layout_invalid: return "LAYOUT_INVALID";
    case ErrorCode::empty_stratum: return "EMPTY_STRATUM";
    case ErrorCode::config_parse: return "CONFIG_PARSE";
    case ErrorCode::io: return "IO";
    case ErrorCode::validation_failed: return "VALIDATION_FAILED";
  }
  return "UNKNOWN";
}

}  // namespace aerosynth
