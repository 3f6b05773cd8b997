#pragma once

#include <stdexcept>
#include <string>

namespace oscilla {

/// Failure categories raised by the toolkit. Each maps to one named error of
/// the public contract; the CLI turns them into exit codes.
enum class ErrorCode {
    NoZerosFound,
    QuadratureFailure,
    DomainError,
    InfeasibleDelta,
    NonpositiveFbar,
    NotApplicable,
    NotAZeroHit,
    StalledAtCriticalPoint,
    NonintegrableStep,
    NonConvergence,
    EmptyGrid,
    ConfigError,
};

[[nodiscard]] const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace oscilla
