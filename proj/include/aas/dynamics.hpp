#pragma once

// Temporal behavior of the total score: Lipschitz rate certification,
// goal-directed update steps, per-channel trajectory metrics, and the
// counterfactual replay audit.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aas/audit.hpp"
#include "aas/kernel.hpp"

namespace aas {

// If per-step inputs obey |dx| <= l_x * dt and |dR| <= l_r * dt, the total
// obeys |dS| <= cap * dt with
//
//     cap = log2((1+eps)/eps) * l_r + l_x / (eps * ln 2).
struct RateCap {
  double epsilon = 0.01;
  double l_x = 0.0;
  double l_r = 0.0;
  double cap = 0.0;
};

RateCap rate_cap(const KernelConfig& cfg, double l_x, double l_r);

// Slack absorbing float rounding when comparing |dS| against cap * dt.
inline constexpr double kRateSlack = 1e-9;

// A run of >= kFlatlineMinSteps consecutive snapshots whose total moves by
// at most kFlatlineTotalTol per step while some channel contribution moves
// by more than kFlatlineChannelMin is reported as a suspicious flatline:
// the stillness is cancellation, not rest.
inline constexpr double kFlatlineTotalTol = 1e-12;
inline constexpr double kFlatlineChannelMin = 1e-6;
inline constexpr std::size_t kFlatlineMinSteps = 3;

struct RateViolation {
  std::size_t from_index = 0;  // step from snapshot i to i+1
  double delta = 0.0;          // S_{i+1} - S_i
  double limit = 0.0;          // cap * dt
};

struct FlatlineWindow {
  std::size_t begin = 0;  // first snapshot index in the run
  std::size_t end = 0;    // last snapshot index in the run (inclusive)
  double max_channel_delta = 0.0;
};

struct RateCheckReport {
  std::vector<RateViolation> violations;
  std::vector<FlatlineWindow> flatlines;

  bool clean() const { return violations.empty(); }
};

// dt must be > 0.  An empty violations list certifies the stream against
// the cap; flatlines are advisory.
RateCheckReport rate_check(std::span<const SessionSnapshot> stream,
                           const RateCap& cap, double dt);

// One goal-directed update x' = (1 - eta) x + eta g per channel.  R and
// metadata are untouched.
struct AppetitionCommand {
  std::vector<double> targets;  // g_i in [0,1]
  std::vector<double> steps;    // eta_i in [0,1]
};

struct AppetitionResult {
  SessionSnapshot next;         // t advanced by 1
  double magnitude = 0.0;       // sum_i alpha_i eta_i |g_i - x_i|
  double guaranteed_drop = 0.0; // sum_i alpha_i eta_i max(0, phi(x_i) - phi(g_i))
};

// Convexity gives the per-channel guarantee
//     phi(x) - phi(x') >= eta (phi(x) - phi(g)),
// so when every target improves the penalty, the realized total drop is at
// least guaranteed_drop.  |phi(x') - phi(x)| <= eta |g - x| / (eps ln 2)
// always.
AppetitionResult appetition_step(const SessionSnapshot& snap,
                                 const AppetitionCommand& cmd,
                                 const KernelConfig& cfg);

// Per-channel stream aggregates.  time_entropy here spreads the cost trace
// c_{t,i} (zero if the channel never pays); the exposure-weighted variant
// lives in TrajectorySummary.  jensen_gap = sum_t alpha phi(x) - A phi(xbar)
// is nonnegative by convexity and zero iff x is constant where alpha > 0.
struct ChannelTrajectoryMetrics {
  double cumulative_cost = 0.0;  // C_i = sum_t c_{t,i}
  double time_entropy = 0.0;     // bits over c_{t,i}/C_i
  double mass = 0.0;             // A_i
  std::optional<double> weighted_mean_x;
  double jensen_gap = 0.0;
};

struct TrajectoryMetrics {
  std::vector<ChannelTrajectoryMetrics> channels;
};

TrajectoryMetrics trajectory_metrics(std::span<const SessionSnapshot> stream,
                                     const KernelConfig& cfg);

// sum_t |c_{t,i} - c_{t,j}|: how differently two channels pay over time.
double trajectory_distance(std::span<const SessionSnapshot> stream,
                           std::size_t i, std::size_t j,
                           const KernelConfig& cfg);

// Replays two worlds that are supposed to differ only off the shared
// channels.  Checks: shared (w, x, R) histories identical; shared
// contributions bit-identical; total difference explained by the
// non-shared contribution differences.  Violations become findings.
AuditReport internality_replay_audit(std::span<const SessionSnapshot> world_a,
                                     std::span<const SessionSnapshot> world_b,
                                     std::span<const std::size_t> shared,
                                     const KernelConfig& cfg);

}  // namespace aas
