#include "hdlab/error.hpp"

namespace hdlab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::calibration_insufficient: return "calibration-insufficient";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::configuration_invalid: return "configuration-invalid";
    case ErrorKind::config_parse: return "config-parse-error";
    case ErrorKind::io: return "io-error";
  }
  return "unknown";
}

}  // namespace hdlab
