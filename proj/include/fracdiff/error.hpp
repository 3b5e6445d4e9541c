#pragma once

#include <stdexcept>
#include <string>

namespace fracdiff {

// Numeric values are part of the C ABI (see fracdiff.h); keep them in sync.
enum class ErrorCode : int {
    InvalidArgument = 1,
    CancellationLoss = 2,
    QuadratureFailure = 3,
    InvalidOrder = 4,
    GridTooCoarse = 5,
    InvalidExponent = 6,
    InadmissibleScenario = 7,
    DegenerateFit = 8,
    Parse = 9,
    Io = 10,
    Internal = 11,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
    if (!condition) {
        throw Error(ErrorCode::InvalidArgument, what);
    }
}

}  // namespace fracdiff
