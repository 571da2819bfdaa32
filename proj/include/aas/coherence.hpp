#pragma once

// Additive penalties for channels that disagree with each other, with
// their own causes, with a paired view, or with their declared direction.
// Every penalty here is reported next to the base total and never mutates
// the inputs; adjusted totals are base + penalty.

#include <cstddef>
#include <span>
#include <vector>

#include "aas/kernel.hpp"

namespace aas {

// Channels that assert together must not both attain: each configured pair
// pays gamma * phi(1 - m) where m = max(0, min(x_i, x_j) - zeta).  The
// term is zero exactly when the joint attainment stays within the margin.
struct ContradictionPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double gamma = 0.0;  // nonnegative pair weight
};

struct ContradictionConfig {
  std::vector<ContradictionPair> pairs;
  double zeta = 0.0;  // margin in [0,1)

  void validate(std::size_t arity) const;  // throws std::invalid_argument
};

struct ContradictionResult {
  double penalty = 0.0;
  double adjusted_total = 0.0;        // base + penalty
  std::vector<double> pair_terms;     // aligned with config pairs
};

ContradictionResult pc_penalty(const SessionSnapshot& snap,
                               const ContradictionConfig& config,
                               const KernelConfig& cfg);

// Declared causes per channel: r_i = a_i0 * prev_x_i + sum_j a_ij * x_j,
// with the row budget a_i0 + sum_j a_ij <= 1 keeping r_i in [0,1].  The
// sufficiency s_i = min(1, (r_i + delta) / (x_i + delta)) prices how much
// of x_i the declared causes account for; the penalty sums alpha_i phi(s_i).
struct CausalNetwork {
  std::vector<std::vector<double>> edges;  // edges[i][j] = a_ij (j -> i)
  std::vector<double> inertia;             // a_i0
  double delta = 0.01;                     // stability constant > 0

  void validate() const;  // throws std::invalid_argument
};

struct SufficiencyResult {
  double penalty = 0.0;
  double adjusted_total = 0.0;
  std::vector<double> sufficiency;  // s_i
};

SufficiencyResult psr_penalty(const SessionSnapshot& snap,
                              std::span<const double> prev_x,
                              const CausalNetwork& net,
                              const KernelConfig& cfg);

// Pairs channels of a body view to channels of a soul view.  When both
// views alias one session the two index sets must be disjoint; that is the
// caller's (config-level) obligation, since the op also accepts genuinely
// distinct sessions whose index ranges may overlap.
struct ViewPairing {
  std::vector<std::size_t> soul_channels;  // I, within the soul snapshot
  std::vector<std::size_t> body_channels;  // J, within the body snapshot
  std::vector<std::size_t> pairing;        // h, aligned with body_channels,
                                           // values drawn from soul_channels
};

// Mismatch m_j = 1 - |x_soul - x_body| per paired channel; the penalty
// sums min(alpha_soul, alpha_body) * phi(m_j).  Totals are the partial
// sums over I and J respectively, so total = soul + body + harm.
struct HarmonyResult {
  double harm = 0.0;
  double soul_total = 0.0;
  double body_total = 0.0;
  double total = 0.0;
  std::vector<double> match;  // m_j, aligned with body_channels
};

HarmonyResult harmony_penalty(const SessionSnapshot& soul,
                              const SessionSnapshot& body,
                              const ViewPairing& pairing,
                              const KernelConfig& cfg);

// Direction agreement against targets y: per channel, the goal sign
// sgn(y - x_t) against the evolution sign sgn(x_{t+1} - x_t) scores
// a = 1, 1/2, 0 (agree, one side flat, oppose) and the penalty sums
// alpha phi(a).  A dead band treats |moves| < band as flat.
struct AlignmentResult {
  double harm = 0.0;
  double adjusted_total = 0.0;        // base(now) + harm
  std::vector<double> alignments;     // a_i in {0, 1/2, 1}
};

AlignmentResult alignment_penalty(const SessionSnapshot& now,
                                  const SessionSnapshot& next,
                                  std::span<const double> targets,
                                  const KernelConfig& cfg,
                                  double dead_band = 0.0);

}  // namespace aas
