#include "aas/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aas {
namespace {

double sign_with_band(double delta, double band) {
  if (delta > band) return 1.0;
  if (delta < -band) return -1.0;
  return 0.0;
}

}  // namespace

void ContradictionConfig::validate(std::size_t arity) const {
  if (!(zeta >= 0.0 && zeta < 1.0)) {
    throw std::invalid_argument("contradiction margin outside [0,1)");
  }
  for (const ContradictionPair& p : pairs) {
    if (p.i >= arity || p.j >= arity || p.i == p.j) {
      throw std::invalid_argument("contradiction pair indices invalid");
    }
    if (!(p.gamma >= 0.0)) {
      throw std::invalid_argument("contradiction pair weight negative");
    }
  }
}

ContradictionResult pc_penalty(const SessionSnapshot& snap,
                               const ContradictionConfig& config,
                               const KernelConfig& cfg) {
  snap.validate();
  cfg.validate();
  config.validate(snap.arity());
  ContradictionResult out;
  out.pair_terms.reserve(config.pairs.size());
  for (const ContradictionPair& p : config.pairs) {
    const double joint =
        std::min(snap.channels[p.i].x, snap.channels[p.j].x);
    const double margined = std::max(0.0, joint - config.zeta);
    const double term = p.gamma * eval_kernel(1.0 - margined, cfg);
    out.pair_terms.push_back(term);
    out.penalty += term;
  }
  out.adjusted_total = score_session(snap, cfg).total + out.penalty;
  return out;
}

void CausalNetwork::validate() const {
  if (edges.size() != inertia.size()) {
    throw std::invalid_argument("causal network shape mismatch");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("causal stability delta must be > 0");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].size() != edges.size()) {
      throw std::invalid_argument("causal network must be square");
    }
    double budget = inertia[i];
    if (!(inertia[i] >= 0.0)) {
      throw std::invalid_argument("causal inertia negative");
    }
    for (double a : edges[i]) {
      if (!(a >= 0.0)) {
        throw std::invalid_argument("causal edge weight negative");
      }
      budget += a;
    }
    if (budget > 1.0 + kWeightSumTol) {
      throw std::invalid_argument("causal row budget exceeds 1");
    }
  }
}

SufficiencyResult psr_penalty(const SessionSnapshot& snap,
                              std::span<const double> prev_x,
                              const CausalNetwork& net,
                              const KernelConfig& cfg) {
  snap.validate();
  cfg.validate();
  net.validate();
  const std::size_t m = snap.arity();
  if (net.edges.size() != m || prev_x.size() != m) {
    throw std::invalid_argument("sufficiency arity mismatch");
  }
  for (double x : prev_x) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::domain_error("previous attainment outside [0,1]");
    }
  }
  SufficiencyResult out;
  out.sufficiency.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double r = net.inertia[i] * prev_x[i];
    for (std::size_t j = 0; j < m; ++j) {
      r += net.edges[i][j] * snap.channels[j].x;
    }
    const double s =
        std::min(1.0, (r + net.delta) / (snap.channels[i].x + net.delta));
    out.sufficiency[i] = s;
    out.penalty += snap.alpha(i) * eval_kernel(s, cfg);
  }
  out.adjusted_total = score_session(snap, cfg).total + out.penalty;
  return out;
}

HarmonyResult harmony_penalty(const SessionSnapshot& soul,
                              const SessionSnapshot& body,
                              const ViewPairing& pairing,
                              const KernelConfig& cfg) {
  soul.validate();
  body.validate();
  cfg.validate();
  for (std::size_t i : pairing.soul_channels) {
    if (i >= soul.arity()) {
      throw std::invalid_argument("soul channel out of range");
    }
  }
  for (std::size_t j : pairing.body_channels) {
    if (j >= body.arity()) {
      throw std::invalid_argument("body channel out of range");
    }
  }
  if (pairing.pairing.size() != pairing.body_channels.size()) {
    throw std::invalid_argument("pairing must be total on the body view");
  }
  for (std::size_t target : pairing.pairing) {
    if (std::find(pairing.soul_channels.begin(), pairing.soul_channels.end(),
                  target) == pairing.soul_channels.end()) {
      throw std::invalid_argument("pairing image leaves the soul view");
    }
  }

  HarmonyResult out;
  for (std::size_t i : pairing.soul_channels) {
    out.soul_total += soul.alpha(i) * eval_kernel(soul.channels[i].x, cfg);
  }
  for (std::size_t k = 0; k < pairing.body_channels.size(); ++k) {
    const std::size_t j = pairing.body_channels[k];
    const std::size_t h = pairing.pairing[k];
    out.body_total += body.alpha(j) * eval_kernel(body.channels[j].x, cfg);
    const double m =
        1.0 - std::abs(soul.channels[h].x - body.channels[j].x);
    out.match.push_back(m);
    out.harm +=
        std::min(soul.alpha(h), body.alpha(j)) * eval_kernel(m, cfg);
  }
  out.total = out.soul_total + out.body_total + out.harm;
  return out;
}

AlignmentResult alignment_penalty(const SessionSnapshot& now,
                                  const SessionSnapshot& next,
                                  std::span<const double> targets,
                                  const KernelConfig& cfg,
                                  double dead_band) {
  now.validate();
  next.validate();
  cfg.validate();
  if (next.arity() != now.arity() || targets.size() != now.arity()) {
    throw std::invalid_argument("alignment arity mismatch");
  }
  if (!(dead_band >= 0.0)) {
    throw std::domain_error("alignment dead band must be nonnegative");
  }
  for (double y : targets) {
    if (!(y > 0.0 && y <= 1.0)) {
      throw std::domain_error("alignment target outside (0,1]");
    }
  }
  AlignmentResult out;
  out.alignments.resize(now.arity());
  for (std::size_t i = 0; i < now.arity(); ++i) {
    const double goal =
        sign_with_band(targets[i] - now.channels[i].x, dead_band);
    const double took =
        sign_with_band(next.channels[i].x - now.channels[i].x, dead_band);
    const double a = 1.0 - 0.5 * std::abs(goal - took);
    out.alignments[i] = a;
    out.harm += now.alpha(i) * eval_kernel(a, cfg);
  }
  out.adjusted_total = score_session(now, cfg).total + out.harm;
  return out;
}

}  // namespace aas
