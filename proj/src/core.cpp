// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/core.hpp"

namespace vortexlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::CoincidentVortices: return "CoincidentVortices";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::CollisionDetected: return "CollisionDetected";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::CoreOverlap: return "CoreOverlap";
    case ErrorCode::EmptyCore: return "EmptyCore";
    case ErrorCode::OpenContour: return "OpenContour";
    case ErrorCode::BallExitsDomain: return "BallExitsDomain";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vortexlab
