#include "athermal/error.hpp"

namespace athermal {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "invalid-parameter";
        case ErrorCode::FreeTarget: return "free-target";
        case ErrorCode::UnsupportedDimension: return "unsupported-dimension";
        case ErrorCode::UnsupportedSize: return "unsupported-size";
        case ErrorCode::InvalidShift: return "invalid-shift";
        case ErrorCode::InvalidFrame: return "invalid-frame";
        case ErrorCode::InvalidTarget: return "invalid-target";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::AuditFailure: return "audit-failure";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace athermal
