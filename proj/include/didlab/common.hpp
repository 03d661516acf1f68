#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace didlab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Error category, used by the CLI to pick an exit code.
enum class ErrorClass {
    Usage,    // bad arguments / bad configuration
    Data,     // missing files, malformed input, invariant violations
    Numeric,  // calibration failure, degenerate inputs to closed forms
};

/// All failures carry a stable machine-readable code (e.g. "UNBALANCED")
/// plus a human-readable message naming the offending group/period/row.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, ErrorClass cls = ErrorClass::Data)
        : std::runtime_error(code + ": " + message), code_(std::move(code)), class_(cls) {}

    const std::string& code() const noexcept { return code_; }
    ErrorClass error_class() const noexcept { return class_; }

private:
    std::string code_;
    ErrorClass class_;
};

[[noreturn]] inline void fail(std::string code, const std::string& msg,
                              ErrorClass cls = ErrorClass::Data) {
    throw Error(std::move(code), msg, cls);
}

inline void require(bool cond, std::string code, const std::string& msg,
                    ErrorClass cls = ErrorClass::Data) {
    if (!cond) fail(std::move(code), msg, cls);
}

}  // namespace didlab
