#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace remix {

enum class ErrorCode {
    UNKNOWN_NODE,
    NO_REFLECTOR,
    UNKNOWN_ENTITY,
    NONCONVERGENCE,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UNKNOWN_NODE: return "UNKNOWN_NODE";
        case ErrorCode::NO_REFLECTOR: return "NO_REFLECTOR";
        case ErrorCode::UNKNOWN_ENTITY: return "UNKNOWN_ENTITY";
        case ErrorCode::NONCONVERGENCE: return "NONCONVERGENCE";
    }
    return "UNKNOWN";
}

/// Failure of an engine operation. The message is prefixed with the code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace remix
