#pragma once

#include <stdexcept>
#include <string>

namespace athermal {

enum class ErrorCode {
    InvalidParameter = 1,
    FreeTarget,           // rate denominator vanishes: target state is the Gibbs state
    UnsupportedDimension,
    UnsupportedSize,
    InvalidShift,
    InvalidFrame,
    InvalidTarget,
    Infeasible,
    AuditFailure,
    Internal,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace athermal
