#include "cuspidal/errors.hpp"

namespace cuspidal {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NotScalable: return "NotScalable";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::ZeroA1: return "ZeroA1";
    case ErrorKind::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorKind::Undefined: return "Undefined";
    case ErrorKind::NotClassifiable: return "NotClassifiable";
    case ErrorKind::UnknownTopology: return "UnknownTopology";
    case ErrorKind::DifferentAspects: return "DifferentAspects";
    case ErrorKind::SingularPath: return "SingularPath";
    case ErrorKind::StartUnreachable: return "StartUnreachable";
    case ErrorKind::NonConvergent: return "NonConvergent";
  }
  return "Unknown";
}

}  // namespace cuspidal
