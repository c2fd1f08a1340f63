#pragma once

#include <stdexcept>
#include <string>

namespace mcvd {

enum class Err {
    OverlappingReceivers,
    TransmitterInsideReceiver,
    NonPositiveParameter,
    IndexOutOfRange,
    StepNotDividingSampleInterval,
    DistanceInsideReceiver,
    LengthMismatch,
    SingularSystem,
    NonFiniteResidual,
    AllZeroTrace,
    NoConvergence,
    DegenerateVariance,
    TooFewReceivers,
    TooFewUsableReceivers,
    DegenerateGeometry,
    ConfigParse,
    Io,
    InvalidArgument,
};

const char* err_name(Err e);

/// Exception with a machine-checkable code; `what()` carries the human message.
class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

    Err code() const noexcept { return code_; }

  private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace mcvd
