#include "aas/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aas {
namespace {

void check_stream(std::span<const SessionSnapshot> stream) {
  for (const SessionSnapshot& snap : stream) {
    snap.validate();
    if (snap.arity() != stream.front().arity()) {
      throw std::invalid_argument("stream arity mismatch");
    }
  }
}

}  // namespace

RateCap rate_cap(const KernelConfig& cfg, double l_x, double l_r) {
  cfg.validate();
  if (!(l_x >= 0.0) || !(l_r >= 0.0)) {
    throw std::domain_error("Lipschitz constants must be nonnegative");
  }
  RateCap cap;
  cap.epsilon = cfg.epsilon;
  cap.l_x = l_x;
  cap.l_r = l_r;
  cap.cap = cfg.phi_zero() * l_r + l_x / (cfg.epsilon * std::log(2.0));
  return cap;
}

RateCheckReport rate_check(std::span<const SessionSnapshot> stream,
                           const RateCap& cap, double dt) {
  if (!(dt > 0.0)) {
    throw std::domain_error("rate check dt must be > 0");
  }
  const KernelConfig cfg{cap.epsilon};
  check_stream(stream);

  RateCheckReport report;
  if (stream.size() < 2) {
    return report;
  }
  std::vector<ScoreBreakdown> breakdowns;
  breakdowns.reserve(stream.size());
  for (const SessionSnapshot& snap : stream) {
    breakdowns.push_back(score_session(snap, cfg));
  }

  const double limit = cap.cap * dt;
  for (std::size_t i = 0; i + 1 < breakdowns.size(); ++i) {
    const double delta = breakdowns[i + 1].total - breakdowns[i].total;
    if (std::abs(delta) > limit + kRateSlack) {
      report.violations.push_back(RateViolation{i, delta, limit});
    }
  }

  // Maximal runs of near-constant totals hiding per-channel motion.
  std::size_t run_start = 0;
  for (std::size_t i = 0; i + 1 <= breakdowns.size(); ++i) {
    const bool flat =
        i + 1 < breakdowns.size() &&
        std::abs(breakdowns[i + 1].total - breakdowns[i].total) <=
            kFlatlineTotalTol;
    if (flat) {
      continue;
    }
    const std::size_t run_end = i;  // inclusive; run covers [run_start, i]
    if (run_end - run_start + 1 >= kFlatlineMinSteps) {
      double max_channel_delta = 0.0;
      for (std::size_t s = run_start; s < run_end; ++s) {
        for (std::size_t c = 0; c < breakdowns[s].contributions.size(); ++c) {
          max_channel_delta = std::max(
              max_channel_delta, std::abs(breakdowns[s + 1].contributions[c] -
                                          breakdowns[s].contributions[c]));
        }
      }
      if (max_channel_delta > kFlatlineChannelMin) {
        report.flatlines.push_back(
            FlatlineWindow{run_start, run_end, max_channel_delta});
      }
    }
    run_start = i + 1;
  }
  return report;
}

AppetitionResult appetition_step(const SessionSnapshot& snap,
                                 const AppetitionCommand& cmd,
                                 const KernelConfig& cfg) {
  snap.validate();
  cfg.validate();
  if (cmd.targets.size() != snap.arity() || cmd.steps.size() != snap.arity()) {
    throw std::invalid_argument("appetition command arity mismatch");
  }
  for (std::size_t i = 0; i < snap.arity(); ++i) {
    if (!(cmd.targets[i] >= 0.0 && cmd.targets[i] <= 1.0)) {
      throw std::domain_error("appetition target outside [0,1]");
    }
    if (!(cmd.steps[i] >= 0.0 && cmd.steps[i] <= 1.0)) {
      throw std::domain_error("appetition step outside [0,1]");
    }
  }
  AppetitionResult out;
  out.next = snap;
  out.next.t = snap.t + 1;
  for (std::size_t i = 0; i < snap.arity(); ++i) {
    const double x = snap.channels[i].x;
    const double g = cmd.targets[i];
    const double eta = cmd.steps[i];
    out.next.channels[i].x = (1.0 - eta) * x + eta * g;
    const double a = snap.alpha(i);
    out.magnitude += a * eta * std::abs(g - x);
    out.guaranteed_drop +=
        a * eta * std::max(0.0, eval_kernel(x, cfg) - eval_kernel(g, cfg));
  }
  return out;
}

TrajectoryMetrics trajectory_metrics(std::span<const SessionSnapshot> stream,
                                     const KernelConfig& cfg) {
  cfg.validate();
  if (stream.empty()) {
    throw std::invalid_argument("trajectory metrics need >= 1 snapshot");
  }
  check_stream(stream);
  const std::size_t m = stream.front().arity();

  TrajectoryMetrics out;
  out.channels.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    ChannelTrajectoryMetrics& ch = out.channels[i];
    std::vector<double> costs;
    costs.reserve(stream.size());
    double weighted_x = 0.0;
    double weighted_phi = 0.0;
    for (const SessionSnapshot& snap : stream) {
      const double a = snap.alpha(i);
      const double phi = eval_kernel(snap.channels[i].x, cfg);
      costs.push_back(a * phi);
      ch.cumulative_cost += a * phi;
      ch.mass += a;
      weighted_x += a * snap.channels[i].x;
      weighted_phi += a * phi;
    }
    if (ch.mass > 0.0) {
      ch.weighted_mean_x = weighted_x / ch.mass;
      ch.jensen_gap =
          weighted_phi - ch.mass * eval_kernel(*ch.weighted_mean_x, cfg);
    }
    if (ch.cumulative_cost > 0.0) {
      for (double c : costs) {
        if (c > 0.0) {
          const double q = c / ch.cumulative_cost;
          ch.time_entropy -= q * std::log2(q);
        }
      }
    }
  }
  return out;
}

double trajectory_distance(std::span<const SessionSnapshot> stream,
                           std::size_t i, std::size_t j,
                           const KernelConfig& cfg) {
  cfg.validate();
  check_stream(stream);
  if (stream.empty() || i >= stream.front().arity() ||
      j >= stream.front().arity()) {
    throw std::invalid_argument("trajectory distance channel out of range");
  }
  double d = 0.0;
  for (const SessionSnapshot& snap : stream) {
    const double ci = snap.alpha(i) * eval_kernel(snap.channels[i].x, cfg);
    const double cj = snap.alpha(j) * eval_kernel(snap.channels[j].x, cfg);
    d += std::abs(ci - cj);
  }
  return d;
}

AuditReport internality_replay_audit(std::span<const SessionSnapshot> world_a,
                                     std::span<const SessionSnapshot> world_b,
                                     std::span<const std::size_t> shared,
                                     const KernelConfig& cfg) {
  cfg.validate();
  check_stream(world_a);
  check_stream(world_b);
  AuditReport report;

  {
    AuditFinding f;
    f.probe = "replay_shape";
    f.passed = world_a.size() == world_b.size() && !world_a.empty() &&
               world_a.front().arity() == world_b.front().arity();
    f.detail = "worlds must have equal length and arity";
    const bool usable = f.passed;
    report.findings.push_back(std::move(f));
    if (!usable) {
      report.sort_by_probe();
      return report;
    }
  }
  for (std::size_t idx : shared) {
    if (idx >= world_a.front().arity()) {
      throw std::invalid_argument("shared channel out of range");
    }
  }

  AuditFinding inputs;
  inputs.probe = "replay_shared_inputs";
  inputs.passed = true;
  inputs.detail = "shared channels must have identical (w, x, R) histories";
  AuditFinding contrib;
  contrib.probe = "replay_shared_contributions";
  contrib.passed = true;
  contrib.detail = "shared contributions must match bit for bit";
  AuditFinding separable;
  separable.probe = "replay_separability";
  separable.passed = true;
  separable.detail =
      "total difference must equal the non-shared contribution differences";

  std::vector<bool> is_shared(world_a.front().arity(), false);
  for (std::size_t idx : shared) {
    is_shared[idx] = true;
  }

  for (std::size_t t = 0; t < world_a.size(); ++t) {
    const SessionSnapshot& a = world_a[t];
    const SessionSnapshot& b = world_b[t];
    for (std::size_t idx : shared) {
      const double din =
          std::max({std::abs(a.weights[idx] - b.weights[idx]),
                    std::abs(a.channels[idx].x - b.channels[idx].x),
                    std::abs(a.channels[idx].R - b.channels[idx].R)});
      inputs.max_abs_diff = std::max(inputs.max_abs_diff, din);
    }
    const ScoreBreakdown ba = score_session(a, cfg);
    const ScoreBreakdown bb = score_session(b, cfg);
    double off_shared = 0.0;
    for (std::size_t i = 0; i < ba.contributions.size(); ++i) {
      const double dc = ba.contributions[i] - bb.contributions[i];
      if (is_shared[i]) {
        contrib.max_abs_diff = std::max(contrib.max_abs_diff, std::abs(dc));
      } else {
        off_shared += dc;
      }
    }
    const double gap = std::abs((ba.total - bb.total) - off_shared);
    separable.max_abs_diff = std::max(separable.max_abs_diff, gap);
  }

  inputs.passed = inputs.max_abs_diff == 0.0;
  contrib.passed = contrib.max_abs_diff == 0.0;
  separable.passed = separable.max_abs_diff <= 1e-12;
  report.findings.push_back(std::move(inputs));
  report.findings.push_back(std::move(contrib));
  report.findings.push_back(std::move(separable));
  report.sort_by_probe();
  return report;
}

}  // namespace aas
