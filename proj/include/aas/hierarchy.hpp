#pragma once

// Nested machines.  A hierarchy tree splits exposure mass over children
// whose internal attainment is always the mass-weighted mean of their
// leaves, so descending a level can only expose penalty, never hide it.
// Grouping views slice a flat stream's channels into organs and track
// which organ dominates the total.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aas/kernel.hpp"

namespace aas {

// alpha at an internal node must equal the sum over its children within
// kWeightSumTol; x is read at leaves only, internal attainment is derived.
struct HierarchyNode {
  std::string id;
  double alpha = 0.0;
  double x = 1.0;  // leaves only
  std::vector<HierarchyNode> children;

  bool is_leaf() const { return children.empty(); }

  void validate() const;  // throws std::invalid_argument; ids must be unique
};

// Mass-weighted leaf mean; 1.0 for a node carrying no mass (it cannot
// contribute either way).
double derived_attainment(const HierarchyNode& node);

struct LevelStat {
  double total = 0.0;       // sum of alpha * phi(X) over the level
  int active_count = 0;     // nodes with a positive contribution
  double entropy_bits = 0.0;
};

struct ParentGain {
  std::string parent_id;
  double gain = 0.0;  // sum_child alpha_c (phi(x_c) - phi(x_parent)) >= 0
};

struct RollupResult {
  std::vector<LevelStat> levels;   // index = depth; leaves persist downward
  std::vector<ParentGain> gains;   // pre-order over internal nodes
  double mass = 0.0;               // root alpha
  double cap = 0.0;                // mass * phi_eps(0)
  std::size_t depth = 0;           // deepest leaf
  bool organic = false;            // every level 1..depth splits the penalty
};

// Level totals are nondecreasing in depth; each step down adds exactly the
// gains of the parents it unfolds.  The organic verdict quantifies over
// levels below the root (a lone root always has zero entropy) and is false
// for a childless tree.
RollupResult level_rollup(const HierarchyNode& root, const KernelConfig& cfg);

// A named slice of a stream's channels, recursively splittable.
struct GroupNode {
  std::string id;
  std::vector<std::size_t> channels;  // ascending, unique
  std::vector<GroupNode> subgroups;   // partition of channels when present
};

struct GroupingView {
  std::vector<GroupNode> groups;  // top level partitions all channels
  std::size_t window = 1;         // W, trailing
  double dominance_margin = 0.0;  // required lead for a stable verdict

  void validate(std::size_t arity) const;  // throws std::invalid_argument
};

struct DominanceScan {
  std::vector<std::vector<double>> shares;       // [t][group]
  std::vector<std::optional<std::size_t>> dominant;  // nullopt when S_t = 0
  std::vector<bool> tie;                         // argmax not unique
  std::vector<double> group_entropy;             // per t, bits
  std::vector<double> windowed_mean_share;       // per group, trailing window
  std::optional<std::size_t> stable_dominant;    // leads every rival by margin
  // Recursive diagnostic: per split node, entropy of its children's shares
  // within it, per t.  Keyed by node id.
  std::map<std::string, std::vector<double>> split_entropy;
};

DominanceScan dominance_scan(std::span<const SessionSnapshot> stream,
                             const GroupingView& view,
                             const KernelConfig& cfg);

// Compares the stream scored with whole-system redundancies against the
// sum of its groups scored with within-group redundancies, which requires
// group_r <= global_r per leaf.  All aggregates are means over the
// trailing window; the two lower bounds scale the dominant group's
// windowed score by its share statistics and can never exceed the global
// windowed mean.
struct WholePartResult {
  std::size_t window = 0;
  double global_mean = 0.0;   // mean_W of the global-R total
  double parts_mean = 0.0;    // mean_W of the summed group totals
  double bound_peak_share = 0.0;  // min_W p(G*) * mean_W S(G*)
  double bound_min_score = 0.0;   // mean_W p(G*) * min_W S(G*)
  std::optional<std::size_t> star_group;  // G*, largest windowed mean share
};

WholePartResult whole_part_check(std::span<const SessionSnapshot> stream,
                                 const GroupingView& view,
                                 std::span<const double> global_r,
                                 std::span<const double> group_r,
                                 const KernelConfig& cfg);

}  // namespace aas
