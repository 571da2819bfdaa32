#include "aas/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aas {

double KernelConfig::phi_zero() const {
  validate();
  return std::log2((1.0 + epsilon) / epsilon);
}

void KernelConfig::validate() const {
  if (!(epsilon > 0.0)) {
    throw std::domain_error("kernel epsilon must be > 0");
  }
}

double eval_kernel(double x, const KernelConfig& cfg) {
  cfg.validate();
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("kernel input x outside [0,1]");
  }
  return std::log2((1.0 + cfg.epsilon) / (x + cfg.epsilon));
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v < 0.0) {
      throw std::domain_error("entropy input has a negative entry");
    }
    if (v > 0.0) {
      h -= v * std::log2(v);
    }
  }
  return h;
}

double SessionSnapshot::alpha_mass() const {
  double a = 0.0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    a += alpha(i);
  }
  return a;
}

void SessionSnapshot::validate() const {
  if (t < 0) {
    throw std::invalid_argument("snapshot t must be nonnegative");
  }
  if (weights.size() != channels.size()) {
    throw std::invalid_argument("snapshot weight/channel arity mismatch");
  }
  if (!metadata.empty() && metadata.size() != channels.size()) {
    throw std::invalid_argument("snapshot metadata arity mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("snapshot weight negative or NaN");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("snapshot weight sum differs from 1");
  }
  for (const ChannelState& ch : channels) {
    if (!(ch.x >= 0.0 && ch.x <= 1.0)) {
      throw std::invalid_argument("channel x outside [0,1]");
    }
    if (!(ch.R >= 0.0 && ch.R <= 1.0)) {
      throw std::invalid_argument("channel R outside [0,1]");
    }
  }
}

double normalized_entropy_kappa(const ScoreBreakdown& b) {
  if (b.active_count < 2) {
    return 0.0;
  }
  return b.contrib_entropy / std::log2(static_cast<double>(b.active_count));
}

ScoreBreakdown score_session_unchecked(const SessionSnapshot& snap,
                                       const KernelConfig& cfg,
                                       const KappaEstimator& kappa) {
  const std::size_t m = snap.arity();
  ScoreBreakdown b;
  b.epsilon = cfg.epsilon;
  b.contributions.resize(m);
  b.phis.resize(m);
  b.shares.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    b.phis[i] = eval_kernel(snap.channels[i].x, cfg);
    b.contributions[i] = snap.alpha(i) * b.phis[i];
    b.total += b.contributions[i];
  }
  if (b.total > 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      b.shares[i] = b.contributions[i] / b.total;
      b.peak_share = std::max(b.peak_share, b.shares[i]);
      if (b.contributions[i] > 0.0) {
        ++b.active_count;
      }
    }
    b.contrib_entropy = entropy_bits(b.shares);
    b.kappa = kappa ? kappa(b) : normalized_entropy_kappa(b);
    if (!(b.kappa >= 0.0 && b.kappa <= 1.0)) {
      throw std::domain_error("kappa estimator left [0,1]");
    }
    b.apper_level = (1.0 - b.kappa) * b.peak_share;
  }
  return b;
}

ScoreBreakdown score_session(const SessionSnapshot& snap,
                             const KernelConfig& cfg,
                             const KappaEstimator& kappa) {
  snap.validate();
  cfg.validate();
  return score_session_unchecked(snap, cfg, kappa);
}

TrajectorySummary trajectory_summary(std::span<const SessionSnapshot> stream,
                                     const KernelConfig& cfg) {
  cfg.validate();
  TrajectorySummary out;
  if (stream.empty()) {
    return out;
  }
  const std::size_t m = stream.front().arity();
  for (const SessionSnapshot& snap : stream) {
    snap.validate();
    if (snap.arity() != m) {
      throw std::invalid_argument("trajectory stream arity mismatch");
    }
  }
  out.channels.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    ChannelTrajectory& ch = out.channels[i];
    double weighted_x = 0.0;
    for (const SessionSnapshot& snap : stream) {
      const double a = snap.alpha(i);
      ch.mass += a;
      weighted_x += a * snap.channels[i].x;
    }
    if (ch.mass > 0.0) {
      ch.weighted_mean_x = weighted_x / ch.mass;
      for (const SessionSnapshot& snap : stream) {
        const double a = snap.alpha(i);
        if (a > 0.0) {
          const double q = a / ch.mass;
          ch.time_entropy -= q * std::log2(q);
        }
      }
    }
  }
  return out;
}

}  // namespace aas
