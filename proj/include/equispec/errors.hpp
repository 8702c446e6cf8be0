#pragma once

#include <stdexcept>
#include <string>

namespace equispec {

/// Error categories surfaced by the CLI as machine-readable codes.
enum class ErrorCategory {
    config_invalid,
    symmetry_violation,
    geometry,
    meshing,
    equivariance_violation,
    numerical,
    precondition,
    io,
};

inline const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config_invalid: return "config-invalid";
        case ErrorCategory::symmetry_violation: return "symmetry-violation";
        case ErrorCategory::geometry: return "geometry";
        case ErrorCategory::meshing: return "meshing";
        case ErrorCategory::equivariance_violation: return "equivariance-violation";
        case ErrorCategory::numerical: return "numerical";
        case ErrorCategory::precondition: return "precondition";
        case ErrorCategory::io: return "io";
    }
    return "unknown";
}

/// Process exit code for a category. Geometry and precondition failures are
/// configuration problems from the caller's point of view.
inline int category_exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config_invalid: return 2;
        case ErrorCategory::geometry: return 2;
        case ErrorCategory::precondition: return 2;
        case ErrorCategory::symmetry_violation: return 3;
        case ErrorCategory::meshing: return 4;
        case ErrorCategory::equivariance_violation: return 4;
        case ErrorCategory::numerical: return 5;
        case ErrorCategory::io: return 6;
    }
    return 1;
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(std::string(category_name(category)) + ": " + message),
          category_(category),
          message_(message) {}

    ErrorCategory category() const { return category_; }
    const std::string& message() const { return message_; }
    int exit_code() const { return category_exit_code(category_); }

  private:
    ErrorCategory category_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) { throw Error(c, msg); }

} // namespace equispec
