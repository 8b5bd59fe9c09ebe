// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  InvalidArgument,
  InvalidDomain,
  FitFailed,
  CoincidentPoints,
  OutsideDomain,
  TooCloseToBoundary,
  CoincidentVortices,
  NoConvergence,
  LeftDomain,
  CollisionDetected,
  InvalidExponent,
  NoRoot,
  CoreOverlap,
  EmptyCore,
  OpenContour,
  BallExitsDomain,
  ConfigInvalid,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// Perpendicular with the clockwise convention: (a, b) -> (b, -a).
inline Vec2 perp_cw(const Vec2& v) { return {v.y(), -v.x()}; }

}  // namespace vortexlab
