#include "aas/teleology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aas {

PerfectionReport variety_order_perfection(const ScoreBreakdown& b,
                                          double alpha_mass, double gamma,
                                          const KernelConfig& cfg) {
  cfg.validate();
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("perfection gamma must lie in (0,1)");
  }
  if (!(alpha_mass > 0.0)) {
    throw std::domain_error("perfection needs positive exposure mass");
  }
  PerfectionReport out;
  out.gamma = gamma;
  out.score_max = alpha_mass * cfg.phi_zero();
  if (b.active_count >= 2) {
    out.variety =
        b.contrib_entropy / std::log2(static_cast<double>(b.active_count));
  }
  out.order = 1.0 - b.total / out.score_max;
  out.perfection =
      std::pow(out.variety, gamma) * std::pow(out.order, 1.0 - gamma);
  return out;
}

DriftLedger drift_classify(std::span<const double> scores,
                           std::size_t window_length, double threshold,
                           std::size_t stride) {
  if (window_length < 1 || stride < 1) {
    throw std::invalid_argument("drift window and stride must be >= 1");
  }
  if (!(threshold > 0.0)) {
    throw std::domain_error("drift threshold must be > 0");
  }
  if (scores.size() < window_length + 1) {
    throw std::invalid_argument("score series shorter than one window");
  }
  DriftLedger ledger;
  ledger.window_length = window_length;
  ledger.threshold = threshold;
  ledger.stride = stride;
  ledger.deltas.reserve(scores.size() - 1);
  for (std::size_t t = 0; t + 1 < scores.size(); ++t) {
    ledger.deltas.push_back(scores[t + 1] - scores[t]);
  }
  for (std::size_t start = 0; start + window_length <= ledger.deltas.size();
       start += stride) {
    DriftWindow w;
    w.start = start;
    for (std::size_t k = 0; k < window_length; ++k) {
      w.sum += ledger.deltas[start + k];
    }
    if (w.sum <= -threshold) {
      w.cls = DriftClass::improvement;
    } else if (w.sum >= threshold) {
      w.cls = DriftClass::regression;
    }
    ledger.windows.push_back(w);
  }
  return ledger;
}

GovernanceDecision governance_decide(const DriftLedger& ledger,
                                     const GovernancePolicy& policy) {
  if (policy.promote_after < 1 || policy.rollback_after < 1) {
    throw std::invalid_argument("governance run lengths must be >= 1");
  }
  auto find_run = [&](DriftClass cls, std::size_t need)
      -> std::vector<std::size_t> {
    std::vector<std::size_t> run;
    for (std::size_t i = 0; i < ledger.windows.size(); ++i) {
      if (ledger.windows[i].cls == cls) {
        run.push_back(i);
        if (run.size() == need) {
          return run;
        }
      } else {
        run.clear();
      }
    }
    return {};
  };

  GovernanceDecision decision;
  if (auto run = find_run(DriftClass::regression, policy.rollback_after);
      !run.empty()) {
    decision.verdict = Verdict::rollback;
    decision.trigger_windows = std::move(run);
    return decision;
  }
  if (auto run = find_run(DriftClass::improvement, policy.promote_after);
      !run.empty()) {
    decision.verdict = Verdict::promote;
    decision.trigger_windows = std::move(run);
    return decision;
  }
  return decision;
}

JusticeReport justice_harness(std::span<const SessionSnapshot> stream,
                              double gamma, const KernelConfig& cfg) {
  cfg.validate();
  if (stream.empty()) {
    throw std::invalid_argument("justice harness needs >= 1 snapshot");
  }
  JusticeReport report;
  report.monotone_nonincreasing = true;
  report.monotone_nondecreasing = true;
  for (const SessionSnapshot& snap : stream) {
    const ScoreBreakdown b = score_session(snap, cfg);
    report.score_trace.push_back(b.total);
    report.perfection_trace.push_back(
        variety_order_perfection(b, snap.alpha_mass(), gamma, cfg)
            .perfection);
  }
  for (std::size_t t = 0; t + 1 < report.score_trace.size(); ++t) {
    const double delta = report.score_trace[t + 1] - report.score_trace[t];
    if (delta > kMonotoneSlack) {
      report.monotone_nonincreasing = false;
    }
    if (delta < -kMonotoneSlack) {
      report.monotone_nondecreasing = false;
    }
  }
  report.final_score = report.score_trace.back();
  report.final_perfection = report.perfection_trace.back();
  report.cap = stream.back().alpha_mass() * cfg.phi_zero();
  report.distance_to_zero = report.final_score;
  report.distance_to_cap = report.cap - report.final_score;
  return report;
}

}  // namespace aas
