#pragma once

// Where a system is heading: the variety/order/perfection summary of one
// snapshot, drift classification of a score series, the promote/rollback
// policy over classified windows, and the boundary harness that drives a
// stream to its best and worst extremes.

#include <cstddef>
#include <span>
#include <vector>

#include "aas/kernel.hpp"

namespace aas {

// variety    V = H / log2(m) for active count m >= 2, else 0
// order      O = 1 - S / (A * phi_eps(0)), the headroom under the worst case
// perfection P = V^gamma * O^(1-gamma), gamma in (0,1), with 0^gamma = 0
struct PerfectionReport {
  double variety = 0.0;
  double order = 0.0;
  double gamma = 0.5;
  double perfection = 0.0;
  double score_max = 0.0;  // A * phi_eps(0)
};

// alpha_mass must be > 0 (a massless session has no order to speak of).
PerfectionReport variety_order_perfection(const ScoreBreakdown& b,
                                          double alpha_mass, double gamma,
                                          const KernelConfig& cfg);

enum class DriftClass { improvement, regression, neutral };

struct DriftWindow {
  std::size_t start = 0;  // first delta index covered
  double sum = 0.0;
  DriftClass cls = DriftClass::neutral;
};

// Deltas d_t = S_{t+1} - S_t, windowed sums classified against a threshold:
// sum <= -eta improvement, sum >= +eta regression, else neutral.
struct DriftLedger {
  std::vector<double> deltas;
  std::size_t window_length = 1;
  double threshold = 0.0;
  std::size_t stride = 1;
  std::vector<DriftWindow> windows;
};

// Needs scores.size() >= window_length + 1 so at least one window exists.
DriftLedger drift_classify(std::span<const double> scores,
                           std::size_t window_length, double threshold,
                           std::size_t stride = 1);

struct GovernancePolicy {
  std::size_t promote_after = 3;   // consecutive improvement windows
  std::size_t rollback_after = 1;  // consecutive regression windows
};

enum class Verdict { promote, rollback, hold };

struct GovernanceDecision {
  Verdict verdict = Verdict::hold;
  // The windows completing the decisive run; empty for hold.
  std::vector<std::size_t> trigger_windows;
};

// Rollback takes precedence: any qualifying regression run anywhere in the
// ledger rolls back even if an improvement run also exists.
GovernanceDecision governance_decide(const DriftLedger& ledger,
                                     const GovernancePolicy& policy);

struct JusticeReport {
  std::vector<double> score_trace;
  std::vector<double> perfection_trace;
  double final_score = 0.0;
  double final_perfection = 0.0;
  double cap = 0.0;  // A_T * phi_eps(0) at the last snapshot
  bool monotone_nonincreasing = false;
  bool monotone_nondecreasing = false;
  double distance_to_zero = 0.0;
  double distance_to_cap = 0.0;
};

// Scores a whole stream and reports how close it runs to the boundary in
// either direction.  Monotonicity flags allow kMonotoneSlack of rounding.
inline constexpr double kMonotoneSlack = 1e-12;

JusticeReport justice_harness(std::span<const SessionSnapshot> stream,
                              double gamma, const KernelConfig& cfg);

}  // namespace aas
