#include "monge/error.hpp"

namespace monge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kConnectivity: return "connectivity-error";
    case ErrorKind::kMetricDegenerate: return "metric-degenerate";
    case ErrorKind::kSubcritical: return "subcritical-error";
    case ErrorKind::kSupercriticalityViolated: return "supercriticality-violated";
    case ErrorKind::kBracket: return "bracket-error";
    case ErrorKind::kMarginal: return "marginal-error";
    case ErrorKind::kRestriction: return "restriction-error";
    case ErrorKind::kTolerance: return "tolerance-error";
    case ErrorKind::kSize: return "size-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown-error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace monge
