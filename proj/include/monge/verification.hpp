#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "monge/io.hpp"

namespace monge {

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  double tol_tight = 0.0;  // 0: automatic
  double tol_cal = 0.0;    // 0: automatic
  std::ostream* progress = nullptr;  // one line per finished check
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double threshold = 0.0;
  std::string summary;
  Json details;
  double seconds = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Criteria 1–10 on fixed instances with pinned thresholds.
VerificationReport run_acceptance_suite(const AcceptanceOptions& options = {});

// "criterion N: PASS|FAIL <name> residual=<r> threshold=<t> <summary>"
std::string format_check_line(const CheckResult& check);

// Wall times go to a separate "timings" object so the checks themselves are
// reproducible byte for byte.
Json to_json(const VerificationReport& report, bool with_timings = true);

}  // namespace monge
