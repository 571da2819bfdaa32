#pragma once

// Evaluation configuration: which clauses run and with what parameters.
// A clause is enabled by the presence of its section (plus an optional
// "enabled" flag inside it).  validate() runs every range and arity check
// up front, so the pipeline never trips over a half-configured clause
// midway through a stream.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aas/coherence.hpp"
#include "aas/hierarchy.hpp"
#include "aas/ontology.hpp"
#include "aas/representation.hpp"

namespace aas {

struct AuditSection {
  std::uint64_t metadata_seed = 0;
  bool ghosts = true;
  std::vector<InsulationProbe> perturbations;
};

struct DedupSection {
  double tolerance = 0.0;
};

struct RateSection {
  double l_x = 0.0;
  double l_r = 0.0;
  double dt = 1.0;
};

struct DizzinessSection {
  double tau = 0.1;
  double delta = 0.05;
};

struct MemorySection {
  double lambda = 0.5;
  double tau = 0.05;
  double eta_smoothing = kDefaultKlSmoothing;
};

struct ReasonSection {
  RationalPrior prior;
  bool law_fixity = true;  // infer r_hat_t := p_t and score the fit
};

struct TruthFloorSection {
  std::vector<std::size_t> rational_set;
  double beta = 1.0;
};

struct SufficientReasonSection {
  CausalNetwork net;
};

struct HarmonySection {
  ViewPairing pairing;  // both views alias the session; I and J disjoint
};

struct AlignmentSection {
  std::vector<double> targets;
  double dead_band = 0.0;
};

struct HierarchySection {
  HierarchyNode tree;
};

struct GroupingSection {
  GroupingView view;
  std::vector<double> global_r;
  std::vector<double> group_r;
};

struct PerfectionSection {
  double gamma = 0.5;
};

struct DriftSection {
  std::size_t window = 4;
  double eta = 0.05;
  std::size_t stride = 1;
  std::size_t promote_after = 3;
  std::size_t rollback_after = 1;
};

struct ClauseConfig {
  std::optional<double> epsilon;  // overrides the session header
  std::uint64_t seed = 0;

  std::optional<AuditSection> audit;
  std::optional<DedupSection> dedup;
  std::optional<RateSection> rate;
  std::optional<DizzinessSection> dizziness;
  std::optional<MemorySection> memory;
  std::optional<ReasonSection> reason;
  std::optional<TruthFloorSection> truth_floor;
  std::optional<ContradictionConfig> contradiction;
  std::optional<SufficientReasonSection> sufficient_reason;
  std::optional<HarmonySection> harmony;
  std::optional<AlignmentSection> alignment;
  std::optional<HierarchySection> hierarchy;
  std::optional<GroupingSection> grouping;
  std::optional<PerfectionSection> perfection;
  std::optional<DriftSection> drift;

  // Throws std::invalid_argument naming the offending clause.
  void validate(std::size_t arity) const;
};

// Throws std::invalid_argument on schema violations; I/O errors surface as
// std::ios_base::failure.
ClauseConfig load_config_file(const std::string& path);
ClauseConfig parse_config(const std::string& text,
                          const std::string& source = "<config>");

}  // namespace aas
