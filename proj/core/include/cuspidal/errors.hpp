#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cuspidal {

enum class ErrorKind {
  InvalidParams,
  NotScalable,
  NotOrthogonal,
  ZeroA1,
  ResolutionTooLow,
  Undefined,
  NotClassifiable,
  UnknownTopology,
  DifferentAspects,
  SingularPath,
  StartUnreachable,
  NonConvergent,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Raised by every analysis operation that cannot honor its precondition.
/// The kind is machine-readable; what() carries a short human reason.
class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(ErrorKind kind, const std::string& reason)
      : std::runtime_error(reason), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cuspidal
