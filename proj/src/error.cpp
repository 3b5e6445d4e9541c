#include "fracdiff/error.hpp"

namespace fracdiff {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::CancellationLoss: return "CancellationLoss";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::InvalidExponent: return "InvalidExponent";
        case ErrorCode::InadmissibleScenario: return "InadmissibleScenario";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace fracdiff
