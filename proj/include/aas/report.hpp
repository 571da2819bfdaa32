#pragma once

// Pipeline output: an ordered list of JSON records.  Emission is
// deterministic byte for byte — object keys are stored sorted and doubles
// print in shortest round-trip form — so identical inputs diff clean.
//
// Record order: config, session (one per t), audit, dedup, rate_check,
// trajectory (one per channel), law_fixity, hierarchy, dominance,
// whole_part, drift, governance.  Sections for disabled clauses are
// simply absent.

#include <string>
#include <vector>

#include <json.hpp>

namespace aas {

struct Report {
  std::vector<nlohmann::json> records;
  bool audits_passed = true;  // false when any audit finding failed

  // Returns the first record with "section" == name, or nullptr.
  const nlohmann::json* find_section(const std::string& name) const;
};

// One record per line, '\n' terminated.
std::string emit_json_lines(const Report& report);

// Human-readable: a per-session summary table plus stream-level one-liners.
std::string emit_table(const Report& report);

}  // namespace aas
