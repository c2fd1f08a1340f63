#include "mcvd/errors.hpp"

namespace mcvd {

const char* err_name(Err code) {
    switch (code) {
        case Err::OverlappingReceivers: return "OverlappingReceivers";
        case Err::TransmitterInsideReceiver: return "TransmitterInsideReceiver";
        case Err::NonPositiveParameter: return "NonPositiveParameter";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::StepNotDividingSampleInterval: return "StepNotDividingSampleInterval";
        case Err::DistanceInsideReceiver: return "DistanceInsideReceiver";
        case Err::LengthMismatch: return "LengthMismatch";
        case Err::SingularSystem: return "SingularSystem";
        case Err::NonFiniteResidual: return "NonFiniteResidual";
        case Err::AllZeroTrace: return "AllZeroTrace";
        case Err::NoConvergence: return "NoConvergence";
        case Err::DegenerateVariance: return "DegenerateVariance";
        case Err::TooFewReceivers: return "TooFewReceivers";
        case Err::TooFewUsableReceivers: return "TooFewUsableReceivers";
        case Err::DegenerateGeometry: return "DegenerateGeometry";
        case Err::ConfigParse: return "ConfigParse";
        case Err::Io: return "Io";
        case Err::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace mcvd
