#include "oscilla/error.hpp"

namespace oscilla {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoZerosFound: return "NoZerosFound";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InfeasibleDelta: return "InfeasibleDelta";
        case ErrorCode::NonpositiveFbar: return "NonpositiveFbar";
        case ErrorCode::NotApplicable: return "NotApplicable";
        case ErrorCode::NotAZeroHit: return "NotAZeroHit";
        case ErrorCode::StalledAtCriticalPoint: return "StalledAtCriticalPoint";
        case ErrorCode::NonintegrableStep: return "NonintegrableStep";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace oscilla
