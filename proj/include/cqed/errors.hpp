#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqed {

enum class ErrorCode {
    InvalidArgument,
    DivergentCooperativity,
    MissingCavity,
    BelowThreshold,
    Truncation,
    SingularSolve,
    StiffnessFailure,
    UnconvergedTail,
    InsufficientWindow,
    NoSwitchesDetected,
};

std::string_view to_string(ErrorCode code);

/// Base class for every failure raised by the library. The code lets
/// front ends map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for failures caused by caller input rather than by the numerics.
    bool is_input_error() const noexcept {
        return code_ == ErrorCode::InvalidArgument || code_ == ErrorCode::MissingCavity ||
               code_ == ErrorCode::DivergentCooperativity || code_ == ErrorCode::BelowThreshold;
    }

private:
    ErrorCode code_;
};

#define CQED_DEFINE_ERROR(Name)                                                      \
    class Name : public Error {                                                      \
    public:                                                                          \
        explicit Name(const std::string& what) : Error(ErrorCode::Name, what) {}     \
    }

CQED_DEFINE_ERROR(InvalidArgument);
CQED_DEFINE_ERROR(DivergentCooperativity);
CQED_DEFINE_ERROR(MissingCavity);
CQED_DEFINE_ERROR(BelowThreshold);
CQED_DEFINE_ERROR(SingularSolve);
CQED_DEFINE_ERROR(StiffnessFailure);
CQED_DEFINE_ERROR(UnconvergedTail);
CQED_DEFINE_ERROR(InsufficientWindow);
CQED_DEFINE_ERROR(NoSwitchesDetected);

class TruncationError : public Error {
public:
    explicit TruncationError(const std::string& what) : Error(ErrorCode::Truncation, what) {}
};

#undef CQED_DEFINE_ERROR

}  // namespace cqed
