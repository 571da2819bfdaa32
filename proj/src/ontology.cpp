#include "aas/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace aas {
namespace {

// Disjoint-set over channel indices; tolerance > 0 makes "duplicate"
// non-transitive, so grouping closes over connected components.
struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);  // lowest index leads
    }
  }
};

void check_stream_arity(std::span<const SessionSnapshot> stream) {
  for (const SessionSnapshot& snap : stream) {
    snap.validate();
    if (snap.arity() != stream.front().arity()) {
      throw std::invalid_argument("stream arity mismatch");
    }
  }
}

std::vector<double> apply_estimator(const RedundancyEstimator& est,
                                    const SessionSnapshot& snap) {
  std::vector<double> r = est(snap);
  if (r.size() != snap.arity()) {
    throw std::invalid_argument("redundancy estimator arity mismatch");
  }
  for (double v : r) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("redundancy estimator left [0,1]");
    }
  }
  return r;
}

SessionSnapshot with_redundancy(const SessionSnapshot& snap,
                                std::span<const double> r) {
  SessionSnapshot out = snap;
  for (std::size_t i = 0; i < out.arity(); ++i) {
    out.channels[i].R = r[i];
  }
  return out;
}

}  // namespace

SessionSnapshot apply_refinement(const SessionSnapshot& snap,
                                 const RefinementPlan& plan) {
  snap.validate();
  if (plan.target_channel >= snap.arity()) {
    throw std::invalid_argument("refinement target out of range");
  }
  if (plan.sub_weights.empty()) {
    throw std::invalid_argument("refinement needs at least one sub-weight");
  }
  double sum = 0.0;
  for (double w : plan.sub_weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("refinement sub-weight negative or NaN");
    }
    sum += w;
  }
  if (std::abs(sum - snap.weights[plan.target_channel]) > kWeightSumTol) {
    throw std::invalid_argument(
        "refinement sub-weights do not sum to the target weight");
  }

  SessionSnapshot out;
  out.t = snap.t;
  const bool has_meta = !snap.metadata.empty();
  for (std::size_t i = 0; i < snap.arity(); ++i) {
    if (i == plan.target_channel) {
      for (double w : plan.sub_weights) {
        out.channels.push_back(snap.channels[i]);
        out.weights.push_back(w);
        if (has_meta) out.metadata.push_back(snap.metadata[i]);
      }
    } else {
      out.channels.push_back(snap.channels[i]);
      out.weights.push_back(snap.weights[i]);
      if (has_meta) out.metadata.push_back(snap.metadata[i]);
    }
  }
  return out;
}

SessionSnapshot permute_channels(const SessionSnapshot& snap,
                                 std::span<const std::size_t> perm) {
  snap.validate();
  if (perm.size() != snap.arity()) {
    throw std::invalid_argument("permutation arity mismatch");
  }
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p]) {
      throw std::invalid_argument("not a permutation");
    }
    seen[p] = true;
  }
  SessionSnapshot out;
  out.t = snap.t;
  const bool has_meta = !snap.metadata.empty();
  for (std::size_t p : perm) {
    out.channels.push_back(snap.channels[p]);
    out.weights.push_back(snap.weights[p]);
    if (has_meta) out.metadata.push_back(snap.metadata[p]);
  }
  return out;
}

SessionSnapshot randomize_metadata(const SessionSnapshot& snap,
                                   std::uint64_t seed) {
  snap.validate();
  SessionSnapshot out = snap;
  std::mt19937_64 rng(seed);
  out.metadata.resize(out.arity());
  for (std::string& blob : out.metadata) {
    static const char* hex = "0123456789abcdef";
    blob.clear();
    std::uint64_t bits = rng();
    for (int n = 0; n < 16; ++n) {
      blob.push_back(hex[bits & 15]);
      bits >>= 4;
    }
  }
  return out;
}

void CompoundSpec::validate() const {
  if (monads.empty()) {
    throw std::invalid_argument("compound needs at least one member");
  }
  if (mixture_weights.size() != monads.size()) {
    throw std::invalid_argument("mixture weight arity mismatch");
  }
  double sum = 0.0;
  for (double pi : mixture_weights) {
    if (!(pi >= 0.0)) {
      throw std::invalid_argument("mixture weight negative or NaN");
    }
    sum += pi;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("mixture weights do not sum to 1");
  }
  const std::size_t steps = monads.front().size();
  for (const auto& stream : monads) {
    if (stream.size() != steps) {
      throw std::invalid_argument("member streams differ in length");
    }
    check_stream_arity(stream);
  }
  if (overlaps.size() != steps) {
    throw std::invalid_argument("overlap mask length mismatch");
  }
  for (std::size_t t = 0; t < steps; ++t) {
    if (overlaps[t].size() != monads.size()) {
      throw std::invalid_argument("overlap mask member mismatch");
    }
    for (std::size_t j = 0; j < monads.size(); ++j) {
      const SessionSnapshot& snap = monads[j][t];
      if (overlaps[t][j].size() != snap.arity()) {
        throw std::invalid_argument("overlap mask channel mismatch");
      }
      for (std::size_t i = 0; i < snap.arity(); ++i) {
        const double lam = overlaps[t][j][i];
        if (!(lam >= 0.0 && lam <= 1.0)) {
          throw std::invalid_argument("overlap mask outside [0,1]");
        }
        if (lam < snap.channels[i].R) {
          throw std::invalid_argument(
              "overlap mask below the member's redundancy");
        }
      }
    }
  }
}

CompoundScore compound_score(const CompoundSpec& spec, std::size_t t,
                             const KernelConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (t >= spec.monads.front().size()) {
    throw std::invalid_argument("compound step index out of range");
  }
  CompoundScore out;
  for (std::size_t j = 0; j < spec.monads.size(); ++j) {
    const SessionSnapshot& snap = spec.monads[j][t];
    const double pi = spec.mixture_weights[j];
    double masked = 0.0;
    for (std::size_t i = 0; i < snap.arity(); ++i) {
      masked += snap.weights[i] * (1.0 - spec.overlaps[t][j][i]) *
                eval_kernel(snap.channels[i].x, cfg);
    }
    out.compound_total += pi * masked;
    out.standalone_mix += pi * score_session(snap, cfg).total;
  }
  return out;
}

IntrinsicSignature intrinsic_signature(std::span<const SessionSnapshot> stream,
                                       std::size_t channel,
                                       const KernelConfig& cfg) {
  cfg.validate();
  check_stream_arity(stream);
  if (stream.empty() || channel >= stream.front().arity()) {
    throw std::invalid_argument("signature channel out of range");
  }
  IntrinsicSignature sig;
  double prev_phi = 0.0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    SignaturePoint pt;
    pt.weight = stream[t].weights[channel];
    pt.phi = eval_kernel(stream[t].channels[channel].x, cfg);
    pt.delta_phi = (t == 0) ? 0.0 : pt.phi - prev_phi;  // signed
    prev_phi = pt.phi;
    sig.points.push_back(pt);
  }
  return sig;
}

double intrinsic_distance(const IntrinsicSignature& a,
                          const IntrinsicSignature& b) {
  if (a.points.size() != b.points.size()) {
    throw std::invalid_argument("signature length mismatch");
  }
  double sup = 0.0;
  for (std::size_t t = 0; t < a.points.size(); ++t) {
    const double d = std::abs(a.points[t].weight - b.points[t].weight) +
                     std::abs(a.points[t].phi - b.points[t].phi) +
                     std::abs(a.points[t].delta_phi - b.points[t].delta_phi);
    sup = std::max(sup, d);
  }
  return sup;
}

std::vector<MergeGroup> dedup_plan(std::span<const SessionSnapshot> stream,
                                   double tolerance,
                                   const KernelConfig& cfg) {
  if (!(tolerance >= 0.0)) {
    throw std::invalid_argument("dedup tolerance must be nonnegative");
  }
  check_stream_arity(stream);
  if (stream.empty()) {
    return {};
  }
  const std::size_t m = stream.front().arity();
  std::vector<IntrinsicSignature> sigs;
  sigs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    sigs.push_back(intrinsic_signature(stream, i, cfg));
  }

  UnionFind uf(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (intrinsic_distance(sigs[i], sigs[j]) > tolerance) {
        continue;
      }
      bool alpha_match = true;
      for (const SessionSnapshot& snap : stream) {
        if (std::abs(snap.alpha(i) - snap.alpha(j)) > tolerance) {
          alpha_match = false;
          break;
        }
      }
      if (alpha_match) {
        uf.unite(i, j);
      }
    }
  }

  std::vector<std::vector<std::size_t>> buckets(m);
  for (std::size_t i = 0; i < m; ++i) {
    buckets[uf.find(i)].push_back(i);
  }
  std::vector<MergeGroup> groups;
  for (std::size_t rep = 0; rep < m; ++rep) {
    if (buckets[rep].size() >= 2) {
      groups.push_back(MergeGroup{rep, buckets[rep]});
    }
  }
  return groups;
}

std::vector<SessionSnapshot> apply_merges(
    std::span<const SessionSnapshot> stream,
    std::span<const MergeGroup> groups) {
  check_stream_arity(stream);
  if (stream.empty()) {
    return {};
  }
  const std::size_t m = stream.front().arity();
  // drop[i]: channel folded into a lower-index representative.
  std::vector<bool> drop(m, false);
  std::vector<std::vector<std::size_t>> absorbed(m);
  for (const MergeGroup& g : groups) {
    if (g.members.empty() || g.representative != g.members.front()) {
      throw std::invalid_argument("merge group representative mismatch");
    }
    for (std::size_t member : g.members) {
      if (member >= m) {
        throw std::invalid_argument("merge group member out of range");
      }
      if (member != g.representative) {
        if (drop[member]) {
          throw std::invalid_argument("channel in two merge groups");
        }
        drop[member] = true;
        absorbed[g.representative].push_back(member);
      }
    }
  }

  std::vector<SessionSnapshot> out;
  out.reserve(stream.size());
  for (const SessionSnapshot& snap : stream) {
    SessionSnapshot merged;
    merged.t = snap.t;
    const bool has_meta = !snap.metadata.empty();
    for (std::size_t i = 0; i < m; ++i) {
      if (drop[i]) continue;
      double w = snap.weights[i];
      for (std::size_t member : absorbed[i]) {
        w += snap.weights[member];
      }
      merged.channels.push_back(snap.channels[i]);
      merged.weights.push_back(w);
      if (has_meta) merged.metadata.push_back(snap.metadata[i]);
    }
    out.push_back(std::move(merged));
  }
  return out;
}

RedundancyEstimator static_redundancy() {
  return [](const SessionSnapshot& snap) {
    std::vector<double> r(snap.arity());
    for (std::size_t i = 0; i < snap.arity(); ++i) {
      r[i] = snap.channels[i].R;
    }
    return r;
  };
}

AuditReport windowless_audit(std::span<const SessionSnapshot> stream,
                             const WindowlessProbes& probes,
                             const KernelConfig& cfg,
                             const RedundancyEstimator& estimator) {
  cfg.validate();
  check_stream_arity(stream);
  const RedundancyEstimator est =
      estimator ? estimator : static_redundancy();
  AuditReport report;

  {
    AuditFinding f;
    f.probe = "metadata_noise";
    f.passed = true;
    for (std::size_t t = 0; t < stream.size(); ++t) {
      const ScoreBreakdown base = score_session(stream[t], cfg);
      const ScoreBreakdown noisy = score_session(
          randomize_metadata(stream[t], probes.metadata_seed + t), cfg);
      for (std::size_t i = 0; i < base.contributions.size(); ++i) {
        f.max_abs_diff =
            std::max(f.max_abs_diff,
                     std::abs(base.contributions[i] - noisy.contributions[i]));
      }
      f.max_abs_diff =
          std::max(f.max_abs_diff, std::abs(base.total - noisy.total));
    }
    f.passed = f.max_abs_diff == 0.0;
    f.detail = "metadata randomization must not move any contribution";
    report.findings.push_back(std::move(f));
  }

  if (probes.ghost_zero_weight) {
    AuditFinding f;
    f.probe = "ghost_zero_weight";
    for (const SessionSnapshot& snap : stream) {
      SessionSnapshot ghosted = snap;
      ghosted.channels.push_back(ChannelState{0.42, 0.37});
      ghosted.weights.push_back(0.0);
      if (!ghosted.metadata.empty()) ghosted.metadata.push_back("ghost");
      const double before = score_session(snap, cfg).total;
      const double after = score_session(ghosted, cfg).total;
      f.max_abs_diff = std::max(f.max_abs_diff, std::abs(before - after));
    }
    f.passed = f.max_abs_diff == 0.0;
    f.detail = "a weightless channel must contribute nothing";
    report.findings.push_back(std::move(f));
  }

  if (probes.ghost_full_redundancy) {
    AuditFinding f;
    f.probe = "ghost_full_redundancy";
    for (const SessionSnapshot& snap : stream) {
      // Surplus weight on purpose: the claim is alpha = 0, not w = 0.  The
      // unchecked path skips the simplex precondition for exactly this probe.
      SessionSnapshot ghosted = snap;
      ghosted.channels.push_back(ChannelState{0.42, 1.0});
      ghosted.weights.push_back(0.25);
      if (!ghosted.metadata.empty()) ghosted.metadata.push_back("ghost");
      const double before = score_session(snap, cfg).total;
      const double after = score_session_unchecked(ghosted, cfg).total;
      f.max_abs_diff = std::max(f.max_abs_diff, std::abs(before - after));
    }
    f.passed = f.max_abs_diff == 0.0;
    f.detail = "a fully redundant channel must contribute nothing";
    report.findings.push_back(std::move(f));
  }

  for (const InsulationProbe& probe : probes.perturbations) {
    AuditFinding f;
    f.probe = "insulation_ch" + std::to_string(probe.channel);
    if (stream.empty() || probe.channel >= stream.front().arity()) {
      f.passed = false;
      f.detail = "probe channel out of range";
      report.findings.push_back(std::move(f));
      continue;
    }
    for (const SessionSnapshot& snap : stream) {
      SessionSnapshot bumped = snap;
      double& x = bumped.channels[probe.channel].x;
      x = std::min(1.0, std::max(0.0, x + probe.dx));
      const ScoreBreakdown base = score_session_unchecked(
          with_redundancy(snap, apply_estimator(est, snap)), cfg);
      const ScoreBreakdown moved = score_session_unchecked(
          with_redundancy(bumped, apply_estimator(est, bumped)), cfg);
      for (std::size_t i = 0; i < base.contributions.size(); ++i) {
        if (i == probe.channel) continue;
        f.max_abs_diff =
            std::max(f.max_abs_diff,
                     std::abs(base.contributions[i] - moved.contributions[i]));
      }
    }
    f.passed = f.max_abs_diff == 0.0;
    f.detail = "perturbing one channel must leave the others untouched";
    report.findings.push_back(std::move(f));
  }

  report.sort_by_probe();
  return report;
}

}  // namespace aas
