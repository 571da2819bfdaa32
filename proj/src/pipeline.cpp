#include "aas/pipeline.hpp"

#include <cstdlib>
#include <future>
#include <thread>

#include "aas/dynamics.hpp"
#include "aas/teleology.hpp"

namespace aas {
namespace {

using nlohmann::json;

template <typename F>
auto guarded(const char* clause, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(clause, e.what());
  }
}

std::vector<ScoreBreakdown> score_all(
    const std::vector<SessionSnapshot>& stream, const KernelConfig& kc) {
  const std::size_t n = stream.size();
  std::vector<ScoreBreakdown> out(n);
  const char* env = std::getenv("AAS_NO_PARALLEL");
  const bool serial = (env != nullptr && std::string(env) == "1");
  const unsigned hw = std::thread::hardware_concurrency();
  if (serial || hw < 2 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = score_session(stream[i], kc);
    }
    return out;
  }
  // Each index is a pure function of its snapshot, so the split cannot
  // change a single bit of the result.
  const std::size_t workers = std::min<std::size_t>(hw, 8);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::future<void>> futs;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t hi = std::min(n, lo + chunk);
    futs.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        out[i] = score_session(stream[i], kc);
      }
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

json echo_tree(const HierarchyNode& node) {
  json j{{"id", node.id}, {"alpha", node.alpha}};
  if (node.is_leaf()) {
    j["x"] = node.x;
  } else {
    json kids = json::array();
    for (const HierarchyNode& c : node.children) kids.push_back(echo_tree(c));
    j["children"] = std::move(kids);
  }
  return j;
}

json echo_group(const GroupNode& node) {
  json j{{"id", node.id}, {"channels", node.channels}};
  if (!node.subgroups.empty()) {
    json subs = json::array();
    for (const GroupNode& s : node.subgroups) subs.push_back(echo_group(s));
    j["subgroups"] = std::move(subs);
  }
  return j;
}

json echo_config(const ClauseConfig& cfg, double eps) {
  json clauses = json::object();
  if (cfg.audit) {
    json perturb = json::array();
    for (const InsulationProbe& p : cfg.audit->perturbations) {
      perturb.push_back(json{{"channel", p.channel}, {"dx", p.dx}});
    }
    clauses["audit"] = json{{"metadata_seed", cfg.audit->metadata_seed},
                            {"ghosts", cfg.audit->ghosts},
                            {"perturb", std::move(perturb)}};
  }
  if (cfg.dedup) {
    clauses["dedup"] = json{{"tolerance", cfg.dedup->tolerance}};
  }
  if (cfg.rate) {
    clauses["rate"] = json{
        {"l_x", cfg.rate->l_x}, {"l_r", cfg.rate->l_r}, {"dt", cfg.rate->dt}};
  }
  if (cfg.dizziness) {
    clauses["dizziness"] =
        json{{"tau", cfg.dizziness->tau}, {"delta", cfg.dizziness->delta}};
  }
  if (cfg.memory) {
    clauses["memory"] = json{{"lambda", cfg.memory->lambda},
                             {"tau", cfg.memory->tau},
                             {"eta_smoothing", cfg.memory->eta_smoothing}};
  }
  if (cfg.reason) {
    clauses["reason"] = json{{"prior", cfg.reason->prior.r},
                             {"eta_smoothing", cfg.reason->prior.eta_smoothing},
                             {"law_fixity", cfg.reason->law_fixity}};
  }
  if (cfg.truth_floor) {
    clauses["truth_floor"] = json{{"rational_set", cfg.truth_floor->rational_set},
                                  {"beta", cfg.truth_floor->beta}};
  }
  if (cfg.contradiction) {
    json pairs = json::array();
    for (const ContradictionPair& p : cfg.contradiction->pairs) {
      pairs.push_back(json{{"i", p.i}, {"j", p.j}, {"gamma", p.gamma}});
    }
    clauses["contradiction"] =
        json{{"zeta", cfg.contradiction->zeta}, {"pairs", std::move(pairs)}};
  }
  if (cfg.sufficient_reason) {
    clauses["sufficient_reason"] =
        json{{"delta", cfg.sufficient_reason->net.delta},
             {"inertia", cfg.sufficient_reason->net.inertia},
             {"edges", cfg.sufficient_reason->net.edges}};
  }
  if (cfg.harmony) {
    clauses["harmony"] = json{{"soul", cfg.harmony->pairing.soul_channels},
                              {"body", cfg.harmony->pairing.body_channels},
                              {"pairing", cfg.harmony->pairing.pairing}};
  }
  if (cfg.alignment) {
    clauses["alignment"] = json{{"targets", cfg.alignment->targets},
                                {"dead_band", cfg.alignment->dead_band}};
  }
  if (cfg.hierarchy) {
    clauses["hierarchy"] = json{{"tree", echo_tree(cfg.hierarchy->tree)}};
  }
  if (cfg.grouping) {
    json groups = json::array();
    for (const GroupNode& g : cfg.grouping->view.groups) {
      groups.push_back(echo_group(g));
    }
    clauses["grouping"] = json{{"groups", std::move(groups)},
                               {"window", cfg.grouping->view.window},
                               {"margin", cfg.grouping->view.dominance_margin},
                               {"global_r", cfg.grouping->global_r},
                               {"group_r", cfg.grouping->group_r}};
  }
  if (cfg.perfection) {
    clauses["perfection"] = json{{"gamma", cfg.perfection->gamma}};
  }
  if (cfg.drift) {
    clauses["drift"] = json{{"window", cfg.drift->window},
                            {"eta", cfg.drift->eta},
                            {"stride", cfg.drift->stride},
                            {"promote_after", cfg.drift->promote_after},
                            {"rollback_after", cfg.drift->rollback_after}};
  }
  return json{{"section", "config"},
              {"epsilon", eps},
              {"seed", cfg.seed},
              {"clauses", std::move(clauses)}};
}

json finding_record(const AuditFinding& f) {
  return json{{"probe", f.probe},
              {"passed", f.passed},
              {"max_abs_diff", f.max_abs_diff},
              {"detail", f.detail}};
}

const char* drift_name(DriftClass cls) {
  switch (cls) {
    case DriftClass::improvement: return "improvement";
    case DriftClass::regression: return "regression";
    case DriftClass::neutral: return "neutral";
  }
  return "neutral";
}

json opt_index(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

Report run_pipeline(const SessionFile& file, const ClauseConfig& cfg) {
  KernelConfig kc{cfg.epsilon.value_or(file.epsilon)};
  guarded("config", [&] {
    kc.validate();
    cfg.validate(file.arity());
  });
  const std::vector<SessionSnapshot>& stream = file.snapshots;
  if (stream.empty()) {
    throw PipelineError("session", "no snapshots to score");
  }
  const std::size_t T = stream.size();
  const std::size_t m = file.arity();

  const std::vector<ScoreBreakdown> breakdowns =
      guarded("kernel", [&] { return score_all(stream, kc); });

  Report rep;
  rep.records.push_back(echo_config(cfg, kc.epsilon));

  // Per-session records, clause outputs nested.  The memory trace at t
  // holds rises strictly before t; it advances only after being used.
  MemoryTrace trace;
  if (cfg.memory) {
    trace = guarded("memory", [&] {
      return make_memory_trace(m, cfg.memory->lambda, kc);
    });
  }
  std::vector<std::vector<double>> inferred_laws;
  if (cfg.reason && cfg.reason->law_fixity) inferred_laws.reserve(T);

  for (std::size_t t = 0; t < T; ++t) {
    const ScoreBreakdown& b = breakdowns[t];
    json rec{{"section", "session"},
             {"t", stream[t].t},
             {"total", b.total},
             {"peak_share", b.peak_share},
             {"contrib_entropy", b.contrib_entropy},
             {"kappa", b.kappa},
             {"apper_level", b.apper_level},
             {"active_count", b.active_count},
             {"contributions", b.contributions},
             {"shares", b.shares},
             {"phis", b.phis}};
    json clauses = json::object();

    if (cfg.dizziness) {
      const DizzinessVerdict v = guarded("dizziness", [&] {
        return dizziness_scan(b, t > 0 ? &breakdowns[t - 1] : nullptr,
                              cfg.dizziness->tau, cfg.dizziness->delta);
      });
      clauses["dizziness"] = json{{"tau_dizzy", v.tau_dizzy},
                                  {"delta_dizzy", v.delta_dizzy},
                                  {"min_active_bound", v.min_active_bound},
                                  {"ap_peak", v.ap_peak}};
    }
    if (cfg.memory) {
      const SequentialityResult s = guarded("memory", [&] {
        return sequentiality(b, trace, cfg.memory->tau,
                             cfg.memory->eta_smoothing);
      });
      clauses["memory"] = json{{"trace", trace.values},
                               {"mass", trace.mass()},
                               {"sequentiality",
                                json{{"consec", s.consec},
                                     {"kl", s.kl},
                                     {"expectation_mass", s.expectation_mass},
                                     {"bound_lhs", s.bound_lhs}}}};
      if (cfg.reason) {
        const double score = guarded("reason", [&] {
          return reason_score(b, trace, cfg.reason->prior);
        });
        clauses["reason"] = json{{"score", score}};
      }
      trace = guarded("memory", [&] {
        const std::vector<double> rises =
            t > 0 ? positive_rises(breakdowns[t - 1], b)
                  : std::vector<double>(m, 0.0);
        return memory_trace_step(trace, rises);
      });
    }
    if (cfg.reason && cfg.reason->law_fixity) {
      inferred_laws.push_back(b.shares);
    }
    if (cfg.truth_floor) {
      const TruthFloorCaps caps = guarded("truth_floor", [&] {
        return truth_floor_caps(stream[t], cfg.truth_floor->rational_set,
                                cfg.truth_floor->beta, kc);
      });
      json rec_caps{{"pointwise_cap", caps.pointwise_cap},
                    {"alpha_mass_cap", caps.alpha_mass_cap},
                    {"p_mass_cap",
                     caps.p_mass_cap ? json(*caps.p_mass_cap) : json(nullptr)},
                    {"rational_share", caps.rational_share},
                    {"p_weighted_mean_phi", caps.p_weighted_mean_phi}};
      clauses["truth_floor"] = std::move(rec_caps);
    }
    if (cfg.contradiction) {
      const ContradictionResult r = guarded("contradiction", [&] {
        return pc_penalty(stream[t], *cfg.contradiction, kc);
      });
      clauses["contradiction"] = json{{"penalty", r.penalty},
                                      {"adjusted_total", r.adjusted_total},
                                      {"pair_terms", r.pair_terms}};
    }
    if (cfg.sufficient_reason && t > 0) {
      const SufficiencyResult r = guarded("sufficient_reason", [&] {
        std::vector<double> prev_x(m);
        for (std::size_t i = 0; i < m; ++i) {
          prev_x[i] = stream[t - 1].channels[i].x;
        }
        return psr_penalty(stream[t], prev_x, cfg.sufficient_reason->net, kc);
      });
      clauses["sufficient_reason"] = json{{"penalty", r.penalty},
                                          {"adjusted_total", r.adjusted_total},
                                          {"sufficiency", r.sufficiency}};
    }
    if (cfg.harmony) {
      const HarmonyResult r = guarded("harmony", [&] {
        return harmony_penalty(stream[t], stream[t], cfg.harmony->pairing, kc);
      });
      clauses["harmony"] = json{{"harm", r.harm},
                                {"soul_total", r.soul_total},
                                {"body_total", r.body_total},
                                {"total", r.total},
                                {"match", r.match}};
    }
    if (cfg.alignment && t + 1 < T) {
      const AlignmentResult r = guarded("alignment", [&] {
        return alignment_penalty(stream[t], stream[t + 1],
                                 cfg.alignment->targets, kc,
                                 cfg.alignment->dead_band);
      });
      clauses["alignment"] = json{{"harm", r.harm},
                                  {"adjusted_total", r.adjusted_total},
                                  {"alignments", r.alignments}};
    }
    if (cfg.perfection) {
      const PerfectionReport p = guarded("perfection", [&] {
        return variety_order_perfection(b, stream[t].alpha_mass(),
                                        cfg.perfection->gamma, kc);
      });
      clauses["perfection"] = json{{"variety", p.variety},
                                   {"order", p.order},
                                   {"gamma", p.gamma},
                                   {"perfection", p.perfection},
                                   {"score_max", p.score_max}};
    }
    if (!clauses.empty()) {
      rec["clauses"] = std::move(clauses);
    }
    rep.records.push_back(std::move(rec));
  }

  if (cfg.audit) {
    const AuditReport audit = guarded("audit", [&] {
      WindowlessProbes probes;
      probes.metadata_seed = cfg.audit->metadata_seed;
      probes.ghost_zero_weight = cfg.audit->ghosts;
      probes.ghost_full_redundancy = cfg.audit->ghosts;
      probes.perturbations = cfg.audit->perturbations;
      return windowless_audit(stream, probes, kc);
    });
    json findings = json::array();
    for (const AuditFinding& f : audit.findings) {
      findings.push_back(finding_record(f));
    }
    rep.audits_passed = rep.audits_passed && audit.passed();
    rep.records.push_back(json{{"section", "audit"},
                               {"passed", audit.passed()},
                               {"findings", std::move(findings)}});
  }

  if (cfg.dedup) {
    json rec = guarded("dedup", [&] {
      const std::vector<MergeGroup> groups =
          dedup_plan(stream, cfg.dedup->tolerance, kc);
      double drift = 0.0;
      if (!groups.empty()) {
        const std::vector<SessionSnapshot> merged = apply_merges(stream, groups);
        for (std::size_t t = 0; t < T; ++t) {
          const ScoreBreakdown mb = score_session(merged[t], kc);
          drift = std::max(drift, std::abs(mb.total - breakdowns[t].total));
        }
      }
      json groups_json = json::array();
      for (const MergeGroup& g : groups) {
        groups_json.push_back(json{{"representative", g.representative},
                                   {"members", g.members}});
      }
      return json{{"section", "dedup"},
                  {"tolerance", cfg.dedup->tolerance},
                  {"groups", std::move(groups_json)},
                  {"merged_total_drift", drift}};
    });
    rep.records.push_back(std::move(rec));
  }

  if (cfg.rate) {
    json rec = guarded("rate", [&] {
      const RateCap cap = rate_cap(kc, cfg.rate->l_x, cfg.rate->l_r);
      const RateCheckReport check = rate_check(stream, cap, cfg.rate->dt);
      json violations = json::array();
      for (const RateViolation& v : check.violations) {
        violations.push_back(json{
            {"from", v.from_index}, {"delta", v.delta}, {"limit", v.limit}});
      }
      json flatlines = json::array();
      for (const FlatlineWindow& w : check.flatlines) {
        flatlines.push_back(json{{"begin", w.begin},
                                 {"end", w.end},
                                 {"max_channel_delta", w.max_channel_delta}});
      }
      return json{{"section", "rate_check"},
                  {"cap", cap.cap},
                  {"l_x", cfg.rate->l_x},
                  {"l_r", cfg.rate->l_r},
                  {"dt", cfg.rate->dt},
                  {"clean", check.clean()},
                  {"violations", std::move(violations)},
                  {"flatlines", std::move(flatlines)}};
    });
    rep.records.push_back(std::move(rec));
  }

  {
    const TrajectoryMetrics metrics =
        guarded("trajectory", [&] { return trajectory_metrics(stream, kc); });
    for (std::size_t i = 0; i < m; ++i) {
      const ChannelTrajectoryMetrics& ch = metrics.channels[i];
      rep.records.push_back(
          json{{"section", "trajectory"},
               {"channel", i},
               {"id", file.channel_ids[i]},
               {"mass", ch.mass},
               {"cumulative_cost", ch.cumulative_cost},
               {"time_entropy", ch.time_entropy},
               {"weighted_mean_x",
                ch.weighted_mean_x ? json(*ch.weighted_mean_x) : json(nullptr)},
               {"jensen_gap", ch.jensen_gap}});
    }
  }

  if (cfg.reason && cfg.reason->law_fixity) {
    const double value = guarded("reason", [&] {
      return law_fixity(cfg.reason->prior, inferred_laws);
    });
    rep.records.push_back(json{{"section", "law_fixity"},
                               {"value", value},
                               {"entries", inferred_laws.size()}});
  }

  if (cfg.hierarchy) {
    json rec = guarded("hierarchy", [&] {
      const RollupResult roll = level_rollup(cfg.hierarchy->tree, kc);
      json levels = json::array();
      for (const LevelStat& s : roll.levels) {
        levels.push_back(json{{"total", s.total},
                              {"active", s.active_count},
                              {"entropy", s.entropy_bits}});
      }
      json gains = json::array();
      for (const ParentGain& g : roll.gains) {
        gains.push_back(json{{"parent", g.parent_id}, {"gain", g.gain}});
      }
      return json{{"section", "hierarchy"},
                  {"levels", std::move(levels)},
                  {"gains", std::move(gains)},
                  {"mass", roll.mass},
                  {"cap", roll.cap},
                  {"depth", roll.depth},
                  {"organic", roll.organic}};
    });
    rep.records.push_back(std::move(rec));
  }

  if (cfg.grouping) {
    json dom_rec = guarded("grouping", [&] {
      const DominanceScan scan =
          dominance_scan(stream, cfg.grouping->view, kc);
      json dominant = json::array();
      for (const auto& d : scan.dominant) dominant.push_back(opt_index(d));
      json ties = json::array();
      for (const bool t_ : scan.tie) ties.push_back(t_);
      json split = json::object();
      for (const auto& [id, series] : scan.split_entropy) split[id] = series;
      return json{{"section", "dominance"},
                  {"shares", scan.shares},
                  {"dominant", std::move(dominant)},
                  {"tie", std::move(ties)},
                  {"group_entropy", scan.group_entropy},
                  {"windowed_mean_share", scan.windowed_mean_share},
                  {"stable_dominant", opt_index(scan.stable_dominant)},
                  {"split_entropy", std::move(split)}};
    });
    rep.records.push_back(std::move(dom_rec));

    json wp_rec = guarded("grouping", [&] {
      const WholePartResult wp =
          whole_part_check(stream, cfg.grouping->view, cfg.grouping->global_r,
                           cfg.grouping->group_r, kc);
      return json{{"section", "whole_part"},
                  {"window", wp.window},
                  {"global_mean", wp.global_mean},
                  {"parts_mean", wp.parts_mean},
                  {"bound_peak_share", wp.bound_peak_share},
                  {"bound_min_score", wp.bound_min_score},
                  {"star_group", opt_index(wp.star_group)}};
    });
    rep.records.push_back(std::move(wp_rec));
  }

  if (cfg.drift) {
    const DriftLedger ledger = guarded("drift", [&] {
      std::vector<double> totals(T);
      for (std::size_t t = 0; t < T; ++t) totals[t] = breakdowns[t].total;
      return drift_classify(totals, cfg.drift->window, cfg.drift->eta,
                            cfg.drift->stride);
    });
    json windows = json::array();
    for (const DriftWindow& w : ledger.windows) {
      windows.push_back(json{
          {"start", w.start}, {"sum", w.sum}, {"class", drift_name(w.cls)}});
    }
    rep.records.push_back(json{{"section", "drift"},
                               {"window", ledger.window_length},
                               {"eta", ledger.threshold},
                               {"stride", ledger.stride},
                               {"deltas", ledger.deltas},
                               {"windows", std::move(windows)}});

    const GovernanceDecision decision = guarded("governance", [&] {
      GovernancePolicy policy;
      policy.promote_after = cfg.drift->promote_after;
      policy.rollback_after = cfg.drift->rollback_after;
      return governance_decide(ledger, policy);
    });
    const char* verdict = decision.verdict == Verdict::promote ? "promote"
                          : decision.verdict == Verdict::rollback ? "rollback"
                                                                  : "hold";
    rep.records.push_back(json{{"section", "governance"},
                               {"verdict", verdict},
                               {"trigger_windows", decision.trigger_windows},
                               {"promote_after", cfg.drift->promote_after},
                               {"rollback_after", cfg.drift->rollback_after}});
  }

  return rep;
}

}  // namespace aas
