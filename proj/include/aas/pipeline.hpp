#pragma once

// Wires every module into one pass over a session file.  Kernel scoring
// runs first (parallel over snapshots unless AAS_NO_PARALLEL=1), then each
// enabled clause in module order: ontology audits, dynamics, representation,
// coherence, hierarchy, teleology.  No clause ever mutates another's input;
// penalties are reported next to the base totals, never folded into them.

#include <stdexcept>
#include <string>

#include "aas/clause_config.hpp"
#include "aas/report.hpp"
#include "aas/session_io.hpp"

namespace aas {

// A module error re-thrown with the clause that raised it.
struct PipelineError : std::runtime_error {
  std::string clause;

  PipelineError(const std::string& clause_name, const std::string& what)
      : std::runtime_error("clause " + clause_name + ": " + what),
        clause(clause_name) {}
};

// Validates the config against the file's arity, then evaluates.  The
// epsilon in force is cfg.epsilon if set, else the session header's.
Report run_pipeline(const SessionFile& file, const ClauseConfig& cfg);

}  // namespace aas
