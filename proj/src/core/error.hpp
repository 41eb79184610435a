// Error codes shared by the C++ core and the C API layer.
#pragma once

#include <stdexcept>
#include <string>

namespace koop {

enum class ErrorCode {
  invalid_argument,
  unknown_name,
  domain_violation,
  integration_diverged,
  degenerate_data,
  unsupported,
  empty_domain,
  io_error,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the last time at which the state was still finite.
class IntegrationDiverged : public Error {
 public:
  IntegrationDiverged(std::string msg, double last_valid_time)
      : Error(ErrorCode::integration_diverged, std::move(msg)),
        last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::unknown_name: return "unknown_name";
    case ErrorCode::domain_violation: return "domain_violation";
    case ErrorCode::integration_diverged: return "integration_diverged";
    case ErrorCode::degenerate_data: return "degenerate_data";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::empty_domain: return "empty_domain";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace koop
