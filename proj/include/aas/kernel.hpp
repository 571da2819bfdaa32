#pragma once

// Surprisal kernel and per-session scoring.
//
// The kernel is
//
//     phi_eps(x) = log2((1 + eps) / (x + eps)),   x in [0,1], eps > 0
//
// It is strictly decreasing and strictly convex on [0,1], phi_eps(1) = 0,
// and it is capped at phi_eps(0) = log2((1+eps)/eps).  A session snapshot
// scores as
//
//     alpha_i = w_i * (1 - R_i)            exposure mass per channel
//     c_i     = alpha_i * phi_eps(x_i)     per-channel contribution
//     S       = sum_i c_i                  session total
//
// With shares p_i = c_i / S (all zero when S = 0), the breakdown also
// carries the peak share rho = max_i p_i, the contribution entropy
// H = -sum_{p_i>0} p_i log2 p_i, the dispersion kappa, and the salience
// level (1 - kappa) * rho.  The default kappa is normalized entropy,
// H / log2(m) for active count m >= 2, else 0; alternative estimators can
// be injected.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aas {

struct KernelConfig {
  double epsilon = 0.01;

  // log2((1+eps)/eps), the kernel value at total absence.
  double phi_zero() const;

  // Throws std::domain_error unless epsilon > 0.
  void validate() const;
};

// phi_eps(x).  Throws std::domain_error if x is outside [0,1] or the
// config is invalid.  Exact zero at x = 1.
double eval_kernel(double x, const KernelConfig& cfg);

// -sum p log2 p over the strictly positive entries, in bits.  Callers pass
// a (sub)distribution; entries must be nonnegative.
double entropy_bits(std::span<const double> p);

struct ChannelState {
  double x = 1.0;  // attainment in [0,1]
  double R = 0.0;  // redundancy in [0,1]
};

// One multi-channel observation at step t.  Weights are a convex
// combination over channels; metadata is opaque to every scoring path
// (nothing below ever reads it).
struct SessionSnapshot {
  std::int64_t t = 0;
  std::vector<ChannelState> channels;
  std::vector<double> weights;
  std::vector<std::string> metadata;  // same arity as channels when present

  std::size_t arity() const { return channels.size(); }

  // w_i * (1 - R_i).  No range checks; validate() covers those.
  double alpha(std::size_t i) const {
    return weights[i] * (1.0 - channels[i].R);
  }

  // sum_i alpha_i.
  double alpha_mass() const;

  // Throws std::invalid_argument on arity mismatches, t < 0, values outside
  // [0,1], negative weights, or |sum w - 1| > kWeightSumTol.
  void validate() const;
};

// Absolute tolerance on the weight simplex constraint.
inline constexpr double kWeightSumTol = 1e-12;

struct ScoreBreakdown {
  std::vector<double> contributions;  // c_i
  std::vector<double> phis;           // phi_eps(x_i), kept for rise/drop diagnostics
  std::vector<double> shares;         // p_i, all zero when total == 0
  double total = 0.0;                 // S
  double peak_share = 0.0;            // rho
  double contrib_entropy = 0.0;       // H, bits
  double kappa = 0.0;
  double apper_level = 0.0;           // (1 - kappa) * rho
  int active_count = 0;               // #{i : c_i > 0}
  double epsilon = 0.0;               // the eps this breakdown was computed with
};

// Maps a breakdown (filled up to kappa) to kappa in [0,1].
using KappaEstimator = std::function<double(const ScoreBreakdown&)>;

// H / log2(m) for m >= 2, else 0.
double normalized_entropy_kappa(const ScoreBreakdown& b);

// Scores one snapshot.  Validates the snapshot and config first; a default
// constructed (empty) estimator means normalized entropy.
ScoreBreakdown score_session(const SessionSnapshot& snap,
                             const KernelConfig& cfg,
                             const KappaEstimator& kappa = {});

// Same computation without precondition checks.  Exists for audit probes
// that deliberately build out-of-contract snapshots (e.g. a ghost channel
// with surplus weight); everything else should call score_session.
ScoreBreakdown score_session_unchecked(const SessionSnapshot& snap,
                                       const KernelConfig& cfg,
                                       const KappaEstimator& kappa = {});

// Per-channel aggregate over a stream of snapshots:
//   mass            A_i = sum_t alpha_{t,i}
//   weighted_mean_x sum_t alpha_{t,i} x_{t,i} / A_i, absent when A_i = 0
//   time_entropy    -sum_{t: alpha>0} (alpha/A) log2(alpha/A), bits
struct ChannelTrajectory {
  double mass = 0.0;
  std::optional<double> weighted_mean_x;
  double time_entropy = 0.0;
};

struct TrajectorySummary {
  std::vector<ChannelTrajectory> channels;
};

// Exact recomputation over the stream; snapshots must share arity.
TrajectorySummary trajectory_summary(std::span<const SessionSnapshot> stream,
                                     const KernelConfig& cfg);

}  // namespace aas
