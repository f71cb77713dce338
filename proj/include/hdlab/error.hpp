#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdlab {

enum class ErrorKind {
  invalid_input,
  calibration_insufficient,
  numeric_failure,
  configuration_invalid,
  config_parse,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. The kind tells callers
/// (the experiment runner in particular) how to classify a failed row.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::invalid_input, message);
}

}  // namespace hdlab
