#pragma once

// How a session's penalty is distributed and remembered: diffuse-attention
// detection, the decaying memory trace of penalty rises, habit-vs-law
// divergences, and floor-driven upper caps on the total.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aas/kernel.hpp"

namespace aas {

// Two ways a session can be "dizzy":
//   tau_dizzy    total > 0 but no single contribution reaches tau; the
//                active count is then forced >= total / tau.
//   delta_dizzy  total > 0 but no channel's kernel value rose by >= delta
//                since the previous snapshot (needs the previous phis;
//                false without them).
struct DizzinessVerdict {
  bool tau_dizzy = false;
  bool delta_dizzy = false;
  double min_active_bound = 0.0;  // total / tau when tau_dizzy, else 0
  double ap_peak = 0.0;           // max_i [phi_t - phi_{t-1}]^+, 0 without prev
};

DizzinessVerdict dizziness_scan(const ScoreBreakdown& cur,
                                const ScoreBreakdown* prev, double tau,
                                double delta);

// [phi_cur,i - phi_prev,i]^+ per channel, from the stored kernel values.
std::vector<double> positive_rises(const ScoreBreakdown& prev,
                                   const ScoreBreakdown& cur);

// Exponentially decaying sum of past penalty rises,
//     M' = rise + lambda * M,   M_0 = 0,
// bounded by phi_eps(0) / (1 - lambda) for rises a valid kernel can emit.
struct MemoryTrace {
  double lambda = 0.5;          // in (0,1)
  double epsilon = 0.01;        // kernel eps backing the cap
  std::vector<double> values;   // M per channel, each in [0, cap()]

  double cap() const;
  double mass() const;          // ||M||_1

  // M / ||M||_1; all zeros when the trace is empty of mass.
  std::vector<double> sequential_prior() const;
};

MemoryTrace make_memory_trace(std::size_t arity, double lambda,
                              const KernelConfig& cfg);

// Pure step.  Each rise must lie in [0, phi_eps(0)]; the stored value is
// clamped to the cap so rounding at the geometric fixed point can never
// breach the invariant.
MemoryTrace memory_trace_step(const MemoryTrace& trace,
                              std::span<const double> rises);

// Agreement between where the penalty sits now (p) and where it has been
// rising (q from the trace):
//   consec            sum_i q_i p_i
//   kl                D(p || q_hat) with q_hat = (1-eta) q + eta uniform
//   expectation_mass  B = sum over channels with M_i >= tau of c_i
//   bound_lhs         (tau / ||M||_1) * (B / S); consec >= bound_lhs always
// All zeros when the breakdown total or the trace mass is zero.
struct SequentialityResult {
  double consec = 0.0;
  double kl = 0.0;
  double expectation_mass = 0.0;
  double bound_lhs = 0.0;
};

inline constexpr double kDefaultKlSmoothing = 1e-6;

SequentialityResult sequentiality(const ScoreBreakdown& b,
                                  const MemoryTrace& trace, double tau,
                                  double eta_smoothing = kDefaultKlSmoothing);

// A declared law distribution over channels, smoothed before any KL use so
// every entry is strictly positive.
struct RationalPrior {
  std::vector<double> r;  // simplex over channels
  double eta_smoothing = kDefaultKlSmoothing;

  std::vector<double> smoothed() const;
  void validate() const;  // throws std::invalid_argument
};

// sum_i p_i log2(r_hat_i / q_hat_i)  =  D(p || q_hat) - D(p || r_hat):
// positive when the law explains the penalty placement better than the
// habit, negative the other way.  A trace with zero mass plays the uniform
// habit (no history is maximally uninformative).
double reason_score(const ScoreBreakdown& b, const MemoryTrace& trace,
                    const RationalPrior& prior);

// Upper caps on the total when the channels in rational_set are promised
// attainment >= beta:
//   pointwise_cap   (sum_S alpha) phi(beta) + sum_{S^c} alpha phi(x)
//   alpha_mass_cap  A [rho_alpha phi(beta) + (1 - rho_alpha) phi(0)]
//   p_mass_cap      phi(beta) (sum_S alpha) / rational_share, absent when
//                   the rational channels carry no share
struct TruthFloorCaps {
  double pointwise_cap = 0.0;
  double alpha_mass_cap = 0.0;
  std::optional<double> p_mass_cap;
  double rational_share = 0.0;       // sum of p over the rational set
  double p_weighted_mean_phi = 0.0;  // sum_i p_i phi(x_i), diagnostic
};

// Throws std::domain_error if beta is outside (0,1] or some promised
// channel sits below the floor.
TruthFloorCaps truth_floor_caps(const SessionSnapshot& snap,
                                std::span<const std::size_t> rational_set,
                                double beta, const KernelConfig& cfg);

// 1 - mean total-variation distance between the declared law and the
// inferred laws, the first inferred entry excluded by the (T-1)-term
// average.  A single-entry (or empty) sequence returns 1 by convention.
double law_fixity(const RationalPrior& prior,
                  std::span<const std::vector<double>> inferred);

}  // namespace aas
