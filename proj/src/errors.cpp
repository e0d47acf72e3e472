#include "degstab/errors.hpp"

namespace degstab {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::NonDegenerate: return "NonDegenerate";
        case ErrorCode::NotPositive: return "NotPositive";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::InconsistentBC: return "InconsistentBC";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::EigSolveFailure: return "EigSolveFailure";
        case ErrorCode::NotLocallyIntegrable: return "NotLocallyIntegrable";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::SubdomainNotAligned: return "SubdomainNotAligned";
        case ErrorCode::QueryOutOfWindow: return "QueryOutOfWindow";
        case ErrorCode::NotExponentiallyStable: return "NotExponentiallyStable";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::BoundViolated: return "BoundViolated";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace degstab
