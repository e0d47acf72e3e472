#pragma once

#include <stdexcept>
#include <string>

namespace degstab {

enum class ErrorCode {
    InvalidArgument,
    IoError,
    ConfigError,
    // coefficient admissibility
    NonDegenerate,
    NotPositive,
    KOutOfRange,
    // assembly
    InconsistentBC,
    GridTooCoarse,
    EigSolveFailure,
    // kernels and feedback
    NotLocallyIntegrable,
    Infeasible,
    SubdomainNotAligned,
    QueryOutOfWindow,
    // time integration
    NotExponentiallyStable,
    LinearSolveFailure,
    NonFiniteState,
    DegenerateFit,
    BoundViolated,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace degstab
