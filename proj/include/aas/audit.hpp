#pragma once

// Shared audit result types.  Audits never throw on a failed expectation;
// they record findings and let the caller decide (the CLI maps a failed
// report to exit code 2).

#include <algorithm>
#include <string>
#include <vector>

namespace aas {

struct AuditFinding {
  std::string probe;       // stable probe identifier
  bool passed = false;
  double max_abs_diff = 0.0;  // worst deviation the probe observed
  std::string detail;
};

struct AuditReport {
  std::vector<AuditFinding> findings;

  bool passed() const {
    return std::all_of(findings.begin(), findings.end(),
                       [](const AuditFinding& f) { return f.passed; });
  }

  // Probe evaluations may run in any order; reports merge deterministically.
  void sort_by_probe() {
    std::sort(findings.begin(), findings.end(),
              [](const AuditFinding& a, const AuditFinding& b) {
                return a.probe < b.probe;
              });
  }
};

}  // namespace aas
