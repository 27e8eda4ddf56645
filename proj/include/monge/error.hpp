#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monge {

// Failure categories surfaced by the library. The CLI maps them onto exit
// codes: configuration and I/O problems are usage errors, everything else is
// a failed mathematical certification.
enum class ErrorKind {
  kInvalidConfig,
  kConnectivity,
  kMetricDegenerate,
  kSubcritical,
  kSupercriticalityViolated,
  kBracket,
  kMarginal,
  kRestriction,
  kTolerance,
  kSize,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace monge
