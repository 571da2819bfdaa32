#include "aas/representation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aas {
namespace {

// (1 - eta) base + eta / n, elementwise.
std::vector<double> smooth_toward_uniform(std::span<const double> base,
                                          double eta) {
  std::vector<double> out(base.size());
  const double u = 1.0 / static_cast<double>(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    out[i] = (1.0 - eta) * base[i] + eta * u;
  }
  return out;
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      d += p[i] * std::log2(p[i] / q[i]);
    }
  }
  return d;
}

}  // namespace

DizzinessVerdict dizziness_scan(const ScoreBreakdown& cur,
                                const ScoreBreakdown* prev, double tau,
                                double delta) {
  if (!(tau > 0.0) || !(delta > 0.0)) {
    throw std::domain_error("dizziness thresholds must be > 0");
  }
  DizzinessVerdict v;
  if (cur.total <= 0.0) {
    return v;
  }
  double max_contrib = 0.0;
  for (double c : cur.contributions) {
    max_contrib = std::max(max_contrib, c);
  }
  if (max_contrib < tau) {
    v.tau_dizzy = true;
    v.min_active_bound = cur.total / tau;
  }
  if (prev != nullptr) {
    if (prev->phis.size() != cur.phis.size()) {
      throw std::invalid_argument("dizziness scan arity mismatch");
    }
    for (std::size_t i = 0; i < cur.phis.size(); ++i) {
      v.ap_peak = std::max(v.ap_peak, cur.phis[i] - prev->phis[i]);
    }
    v.ap_peak = std::max(v.ap_peak, 0.0);
    v.delta_dizzy = v.ap_peak < delta;
  }
  return v;
}

std::vector<double> positive_rises(const ScoreBreakdown& prev,
                                   const ScoreBreakdown& cur) {
  if (prev.phis.size() != cur.phis.size()) {
    throw std::invalid_argument("rise arity mismatch");
  }
  std::vector<double> rises(cur.phis.size());
  for (std::size_t i = 0; i < cur.phis.size(); ++i) {
    rises[i] = std::max(0.0, cur.phis[i] - prev.phis[i]);
  }
  return rises;
}

double MemoryTrace::cap() const {
  return KernelConfig{epsilon}.phi_zero() / (1.0 - lambda);
}

double MemoryTrace::mass() const {
  double m = 0.0;
  for (double v : values) {
    m += v;
  }
  return m;
}

std::vector<double> MemoryTrace::sequential_prior() const {
  std::vector<double> q(values.size(), 0.0);
  const double m = mass();
  if (m > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      q[i] = values[i] / m;
    }
  }
  return q;
}

MemoryTrace make_memory_trace(std::size_t arity, double lambda,
                              const KernelConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::domain_error("trace decay lambda must lie in (0,1)");
  }
  MemoryTrace trace;
  trace.lambda = lambda;
  trace.epsilon = cfg.epsilon;
  trace.values.assign(arity, 0.0);
  return trace;
}

MemoryTrace memory_trace_step(const MemoryTrace& trace,
                              std::span<const double> rises) {
  if (!(trace.lambda > 0.0 && trace.lambda < 1.0)) {
    throw std::domain_error("trace decay lambda must lie in (0,1)");
  }
  if (rises.size() != trace.values.size()) {
    throw std::invalid_argument("trace step arity mismatch");
  }
  const double phi0 = KernelConfig{trace.epsilon}.phi_zero();
  MemoryTrace next = trace;
  for (std::size_t i = 0; i < rises.size(); ++i) {
    if (!(rises[i] >= 0.0 && rises[i] <= phi0)) {
      throw std::domain_error("trace rise outside [0, phi_eps(0)]");
    }
    next.values[i] = std::min(rises[i] + trace.lambda * trace.values[i],
                              trace.cap());
  }
  return next;
}

SequentialityResult sequentiality(const ScoreBreakdown& b,
                                  const MemoryTrace& trace, double tau,
                                  double eta_smoothing) {
  if (!(tau > 0.0)) {
    throw std::domain_error("sequentiality tau must be > 0");
  }
  if (!(eta_smoothing > 0.0 && eta_smoothing < 1.0)) {
    throw std::domain_error("KL smoothing must lie in (0,1)");
  }
  if (trace.values.size() != b.contributions.size()) {
    throw std::invalid_argument("sequentiality arity mismatch");
  }
  SequentialityResult out;
  const double m = trace.mass();
  if (b.total <= 0.0 || m <= 0.0) {
    return out;
  }
  const std::vector<double> q = trace.sequential_prior();
  const std::vector<double> q_hat = smooth_toward_uniform(q, eta_smoothing);
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.consec += q[i] * b.shares[i];
    if (trace.values[i] >= tau) {
      out.expectation_mass += b.contributions[i];
    }
  }
  out.kl = kl_bits(b.shares, q_hat);
  out.bound_lhs = (tau / m) * (out.expectation_mass / b.total);
  return out;
}

std::vector<double> RationalPrior::smoothed() const {
  validate();
  return smooth_toward_uniform(r, eta_smoothing);
}

void RationalPrior::validate() const {
  if (r.empty()) {
    throw std::invalid_argument("prior must not be empty");
  }
  double sum = 0.0;
  for (double v : r) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("prior entry negative or NaN");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("prior does not sum to 1");
  }
  if (!(eta_smoothing >= 0.0 && eta_smoothing < 1.0)) {
    throw std::invalid_argument("prior smoothing outside [0,1)");
  }
  const double u = 1.0 / static_cast<double>(r.size());
  for (double v : r) {
    if ((1.0 - eta_smoothing) * v + eta_smoothing * u <= 0.0) {
      throw std::invalid_argument("smoothed prior is not strictly positive");
    }
  }
}

double reason_score(const ScoreBreakdown& b, const MemoryTrace& trace,
                    const RationalPrior& prior) {
  prior.validate();
  if (prior.r.size() != b.contributions.size() ||
      trace.values.size() != b.contributions.size()) {
    throw std::invalid_argument("reason score arity mismatch");
  }
  std::vector<double> q = trace.sequential_prior();
  if (trace.mass() <= 0.0) {
    q.assign(q.size(), 1.0 / static_cast<double>(q.size()));
  }
  const std::vector<double> q_hat =
      smooth_toward_uniform(q, prior.eta_smoothing);
  const std::vector<double> r_hat = prior.smoothed();
  double score = 0.0;
  for (std::size_t i = 0; i < b.shares.size(); ++i) {
    if (b.shares[i] > 0.0) {
      score += b.shares[i] * std::log2(r_hat[i] / q_hat[i]);
    }
  }
  return score;
}

TruthFloorCaps truth_floor_caps(const SessionSnapshot& snap,
                                std::span<const std::size_t> rational_set,
                                double beta, const KernelConfig& cfg) {
  snap.validate();
  cfg.validate();
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::domain_error("truth floor beta must lie in (0,1]");
  }
  std::vector<bool> in_set(snap.arity(), false);
  for (std::size_t idx : rational_set) {
    if (idx >= snap.arity()) {
      throw std::invalid_argument("rational channel out of range");
    }
    if (snap.channels[idx].x < beta) {
      throw std::domain_error("rational channel sits below the floor beta");
    }
    in_set[idx] = true;
  }

  const double phi_beta = eval_kernel(beta, cfg);
  const double phi_zero = cfg.phi_zero();
  const ScoreBreakdown b = score_session(snap, cfg);

  TruthFloorCaps caps;
  double rational_alpha = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < snap.arity(); ++i) {
    if (in_set[i]) {
      rational_alpha += snap.alpha(i);
      caps.rational_share += b.shares[i];
    } else {
      outside += snap.alpha(i) * b.phis[i];
    }
    caps.p_weighted_mean_phi += b.shares[i] * b.phis[i];
  }
  caps.pointwise_cap = rational_alpha * phi_beta + outside;

  const double mass = snap.alpha_mass();
  if (mass > 0.0) {
    const double rho_alpha = rational_alpha / mass;
    caps.alpha_mass_cap =
        mass * (rho_alpha * phi_beta + (1.0 - rho_alpha) * phi_zero);
  }
  if (caps.rational_share > 0.0) {
    caps.p_mass_cap = phi_beta * rational_alpha / caps.rational_share;
  }
  return caps;
}

double law_fixity(const RationalPrior& prior,
                  std::span<const std::vector<double>> inferred) {
  prior.validate();
  if (inferred.size() <= 1) {
    return 1.0;
  }
  double sum_tv = 0.0;
  for (std::size_t t = 1; t < inferred.size(); ++t) {
    if (inferred[t].size() != prior.r.size()) {
      throw std::invalid_argument("inferred law dimension mismatch");
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < prior.r.size(); ++i) {
      l1 += std::abs(prior.r[i] - inferred[t][i]);
    }
    sum_tv += 0.5 * l1;
  }
  return 1.0 - sum_tv / static_cast<double>(inferred.size() - 1);
}

}  // namespace aas
