#pragma once

// Structural identity of sessions: weight refinement, compound mixtures,
// intrinsic channel signatures, duplicate detection, and the
// windowlessness audit.
//
// The load-bearing facts, each backed by a test:
//   - splitting a channel's weight across children that inherit its (x, R)
//     leaves the total unchanged (scores live on mass, not on labels);
//   - a compound scored with overlap masks Lambda >= R never exceeds the
//     mixture of its members' standalone scores, with equality at
//     Lambda = R;
//   - metadata and channel order are never read by any scoring path;
//   - channels are distinguished only by their intrinsic signature
//     (weight, kernel value, kernel increment) and exposure path.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aas/audit.hpp"
#include "aas/kernel.hpp"

namespace aas {

// Splits one channel's weight over children that inherit its state.
struct RefinementPlan {
  std::size_t target_channel = 0;
  std::vector<double> sub_weights;  // nonnegative, sums to the target's weight
};

// Children are inserted at the target's position; every other channel keeps
// its relative order.  Throws std::invalid_argument on a bad target, a
// negative sub-weight, or |sum sub - w_target| > kWeightSumTol.
SessionSnapshot apply_refinement(const SessionSnapshot& snap,
                                 const RefinementPlan& plan);

// Reorders channels by perm (new index -> old index).  perm must be a
// permutation of [0, arity).
SessionSnapshot permute_channels(const SessionSnapshot& snap,
                                 std::span<const std::size_t> perm);

// Replaces every metadata blob with seeded noise.  Scoring output must not
// move; the windowlessness audit leans on this.
SessionSnapshot randomize_metadata(const SessionSnapshot& snap,
                                   std::uint64_t seed);

// A mixture of member streams with explicit overlap masks.
// overlaps[t][j][i] = Lambda for member j, channel i, at step t; each mask
// must dominate the member's own redundancy at that point.
struct CompoundSpec {
  std::vector<std::vector<SessionSnapshot>> monads;
  std::vector<double> mixture_weights;  // nonnegative, sums to 1
  std::vector<std::vector<std::vector<double>>> overlaps;

  void validate() const;  // throws std::invalid_argument
};

struct CompoundScore {
  double compound_total = 0.0;   // masked by (1 - Lambda)
  double standalone_mix = 0.0;   // sum_j pi_j * member total
};

// Scores the compound at step index t.  compound_total <= standalone_mix
// always; equality iff Lambda == R on every exposed term.
CompoundScore compound_score(const CompoundSpec& spec, std::size_t t,
                             const KernelConfig& cfg);

// What a channel is, observationally: per step, its weight, kernel value,
// and signed kernel increment (zero at the first step).
struct SignaturePoint {
  double weight = 0.0;
  double phi = 0.0;
  double delta_phi = 0.0;
};

struct IntrinsicSignature {
  std::vector<SignaturePoint> points;  // one per snapshot
};

IntrinsicSignature intrinsic_signature(std::span<const SessionSnapshot> stream,
                                       std::size_t channel,
                                       const KernelConfig& cfg);

// sup over steps of |dw| + |dphi| + |d(delta_phi)|.  Signatures must have
// equal length.
double intrinsic_distance(const IntrinsicSignature& a,
                          const IntrinsicSignature& b);

struct MergeGroup {
  std::size_t representative = 0;      // lowest member index
  std::vector<std::size_t> members;    // ascending, includes representative
};

// Groups channels whose signature distance is <= tolerance and whose
// exposure paths alpha_{t,i} agree within tolerance at every step
// (transitively, for tolerance > 0).  Only groups of two or more channels
// are returned.  Default tolerance 0 means exact duplicates.
std::vector<MergeGroup> dedup_plan(std::span<const SessionSnapshot> stream,
                                   double tolerance, const KernelConfig& cfg);

// Collapses each group onto its representative, summing weights; all other
// channels pass through in order.  With tolerance-0 groups this preserves
// every session total exactly up to float summation.
std::vector<SessionSnapshot> apply_merges(
    std::span<const SessionSnapshot> stream,
    std::span<const MergeGroup> groups);

// Replaces the per-channel redundancies before scoring.  The default
// estimator returns R exactly as given, which is what makes cross-channel
// insulation exact.
using RedundancyEstimator =
    std::function<std::vector<double>(const SessionSnapshot&)>;

RedundancyEstimator static_redundancy();

struct InsulationProbe {
  std::size_t channel = 0;
  double dx = 0.0;  // applied to x and clamped to [0,1]
};

struct WindowlessProbes {
  std::uint64_t metadata_seed = 0;
  bool ghost_zero_weight = true;     // append a channel with w = 0
  bool ghost_full_redundancy = true; // append a channel with R = 1
  std::vector<InsulationProbe> perturbations;
};

// Confirms that scoring depends on nothing but (w, x, R): metadata noise
// and ghost channels leave every total bit-identical, and perturbing one
// channel's x moves no other channel's contribution under the given
// estimator.  Findings are sorted by probe id.
AuditReport windowless_audit(std::span<const SessionSnapshot> stream,
                             const WindowlessProbes& probes,
                             const KernelConfig& cfg,
                             const RedundancyEstimator& estimator = {});

}  // namespace aas
