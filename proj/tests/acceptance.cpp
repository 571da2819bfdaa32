// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// eleven hold.  Tolerances and time limits are pinned here on purpose;
// loosening them is a behavior change, not a test fix.
//
// Usage: acceptance --cli <path-to-aas-binary> --config-dir <path>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aas/coherence.hpp"
#include "aas/dynamics.hpp"
#include "aas/hierarchy.hpp"
#include "aas/kernel.hpp"
#include "aas/ontology.hpp"
#include "aas/representation.hpp"
#include "aas/synthetic.hpp"
#include "aas/teleology.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace aas;

#define NEED(cond)                                                         \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw std::runtime_error(std::string("line ") +                      \
                               std::to_string(__LINE__) + ": " #cond);     \
    }                                                                      \
  } while (0)

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const KernelConfig kDefault{};

ScoreBreakdown exact_shares_breakdown(const std::vector<double>& shares) {
  ScoreBreakdown b;
  b.contributions = shares;
  b.phis = shares;
  b.shares = shares;
  b.total = 1.0;
  b.epsilon = kDefault.epsilon;
  for (double s : shares) {
    if (s > 0.0) ++b.active_count;
    b.peak_share = std::max(b.peak_share, s);
  }
  return b;
}

MemoryTrace trace_of(std::vector<double> values, double lambda) {
  MemoryTrace t = make_memory_trace(values.size(), lambda, kDefault);
  t.values = std::move(values);
  return t;
}

HierarchyNode random_tree(std::mt19937_64& rng, double alpha, int depth_left,
                          int& leaf_budget, int& next_id) {
  HierarchyNode n;
  n.id = "n" + std::to_string(next_id++);
  n.alpha = alpha;
  if (depth_left == 0 || leaf_budget <= 1 || rng() % 4 == 0) {
    n.x = gen::unit(rng);
    --leaf_budget;
    return n;
  }
  const int kids =
      std::min(2 + static_cast<int>(rng() % 3), leaf_budget);
  std::vector<double> raw(kids);
  double raw_sum = 0.0;
  for (double& r : raw) {
    r = 0.1 + gen::unit(rng);
    raw_sum += r;
  }
  double used = 0.0;
  for (int k = 0; k < kids; ++k) {
    const double share =
        k + 1 == kids ? alpha - used : alpha * raw[k] / raw_sum;
    used += share;
    n.children.push_back(
        random_tree(rng, share, depth_left - 1, leaf_budget, next_id));
  }
  return n;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  NEED(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criteria -------------------------------------------------------------

void criterion_kernel() {
  const auto start = Clock::now();
  NEED(eval_kernel(1.0, kDefault) == 0.0);
  NEED(std::abs(eval_kernel(0.0, kDefault) - oracle::kPhi0) < 1e-12);
  NEED(std::abs(eval_kernel(0.0, kDefault) - 6.65821) < 1e-4);
  NEED(std::abs(eval_kernel(0.5, kDefault) - oracle::kPhiHalf) < 1e-12);

  std::mt19937_64 rng(101);
  for (int i = 0; i < 10000; ++i) {
    const SessionSnapshot snap = gen::snapshot(rng, 1 + (rng() % 8));
    const ScoreBreakdown b = score_session(snap, kDefault);
    const double cap = snap.alpha_mass() * kDefault.phi_zero();
    NEED(b.total >= 0.0);
    NEED(b.total <= cap + 1e-12);
    NEED(b.peak_share >= 0.0 && b.peak_share <= 1.0);
    NEED(b.kappa >= 0.0 && b.kappa <= 1.0);
    NEED(b.contrib_entropy >= -1e-12);
    NEED(b.apper_level >= 0.0 && b.apper_level <= 1.0);
    if (b.total > 0.0) {
      const double share_sum =
          std::accumulate(b.shares.begin(), b.shares.end(), 0.0);
      NEED(std::abs(share_sum - 1.0) < 1e-9);
    }
  }
  NEED(seconds_since(start) < 1.0);
}

void criterion_invariance() {
  const auto start = Clock::now();
  std::mt19937_64 rng(102);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 2 + (rng() % 5);
    const SessionSnapshot original = gen::snapshot(rng, m);
    const double s0 = score_session(original, kDefault).total;

    RefinementPlan plan;
    plan.target_channel = rng() % m;
    const double w = original.weights[plan.target_channel];
    const double f = 0.1 + 0.8 * gen::unit(rng);
    plan.sub_weights = {w * f, w - w * f};
    SessionSnapshot snap = apply_refinement(original, plan);

    std::vector<std::size_t> perm(snap.arity());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    snap = permute_channels(snap, perm);
    snap = randomize_metadata(snap, rng());

    const double s1 = score_session(snap, kDefault).total;
    NEED(std::abs(s1 - s0) <= 1e-12 * std::max(1.0, std::abs(s0)));
  }
  NEED(seconds_since(start) < 5.0);
}

void criterion_windowless() {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 2 + (rng() % 4);
    const std::size_t steps = 3 + (rng() % 6);
    std::vector<SessionSnapshot> stream;
    for (std::size_t t = 0; t < steps; ++t) {
      stream.push_back(gen::snapshot(rng, m, static_cast<int>(t)));
    }
    WindowlessProbes probes;
    probes.metadata_seed = rng();
    probes.perturbations = {
        InsulationProbe{rng() % m, gen::unit(rng) - 0.5}};
    const AuditReport rep = windowless_audit(stream, probes, kDefault);
    NEED(rep.passed());
    for (const AuditFinding& f : rep.findings) {
      NEED(f.max_abs_diff == 0.0);
    }
  }
}

void criterion_dedup() {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ScenarioSpec spec;
    spec.scenario = Scenario::clones;
    spec.seed = seed;
    const SessionFile file = generate_synthetic(spec);
    const KernelConfig kc{file.epsilon};

    const auto planted = planted_clone_pairs(spec);
    const auto groups = dedup_plan(file.snapshots, 0.0, kc);
    NEED(groups.size() == planted.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
      NEED(groups[k].members.size() == 2);
      NEED(groups[k].members[0] == planted[k].first);
      NEED(groups[k].members[1] == planted[k].second);
    }

    const std::vector<SessionSnapshot> merged =
        apply_merges(file.snapshots, groups);
    for (std::size_t t = 0; t < file.snapshots.size(); ++t) {
      const double before = score_session(file.snapshots[t], kc).total;
      const double after = score_session(merged[t], kc).total;
      NEED(std::abs(after - before) <= 1e-9 * std::max(1.0, before));
    }
  }
}

void criterion_rate() {
  std::mt19937_64 rng(105);
  const double lip = 1.0 / (kDefault.epsilon * std::numbers::ln2);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + (rng() % 4);
    const SessionSnapshot snap = gen::snapshot(rng, m, 0, false);
    AppetitionCommand cmd;
    cmd.targets.resize(m);
    cmd.steps.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double x = snap.channels[k].x;
      cmd.targets[k] = x + (1.0 - x) * gen::unit(rng);  // never worse
      cmd.steps[k] = gen::unit(rng);
    }
    const AppetitionResult res = appetition_step(snap, cmd, kDefault);
    const double before = score_session(snap, kDefault).total;
    const double after = score_session(res.next, kDefault).total;
    NEED(before - after >= res.guaranteed_drop - 1e-9);
    for (std::size_t k = 0; k < m; ++k) {
      const double dphi = std::abs(eval_kernel(res.next.channels[k].x, kDefault) -
                                   eval_kernel(snap.channels[k].x, kDefault));
      const double move = cmd.steps[k] *
                          std::abs(cmd.targets[k] - snap.channels[k].x);
      NEED(dphi <= lip * move + 1e-9);
    }
  }

  for (int i = 0; i < 50; ++i) {
    const double l_x = 0.01 + 0.2 * gen::unit(rng);
    const double l_r = 0.05 * gen::unit(rng);
    const std::vector<SessionSnapshot> stream =
        gen::lipschitz_stream(rng, 2 + (rng() % 3), 8, l_x, l_r);
    const RateCheckReport rep =
        rate_check(stream, rate_cap(kDefault, l_x, l_r), 1.0);
    NEED(rep.clean());
  }
}

void criterion_hierarchy_chain() {
  const auto start = Clock::now();
  std::mt19937_64 rng(106);

  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + (rng() % 3);
    const std::size_t steps = 2 + (rng() % 6);
    std::vector<SessionSnapshot> stream;
    const bool constant_x = i % 5 == 0;
    const SessionSnapshot base = gen::snapshot(rng, m, 0, false);
    for (std::size_t t = 0; t < steps; ++t) {
      SessionSnapshot s = base;
      s.t = static_cast<int>(t);
      if (!constant_x) {
        for (ChannelState& ch : s.channels) ch.x = gen::unit(rng);
      }
      stream.push_back(std::move(s));
    }
    const TrajectoryMetrics metrics = trajectory_metrics(stream, kDefault);
    for (const ChannelTrajectoryMetrics& ch : metrics.channels) {
      NEED(ch.jensen_gap >= -1e-12);
      if (constant_x) NEED(std::abs(ch.jensen_gap) <= 1e-9);
    }
  }

  for (int i = 0; i < 1000; ++i) {
    int leaf_budget = 64;
    int next_id = 0;
    const HierarchyNode root =
        random_tree(rng, 0.25 + gen::unit(rng), 5, leaf_budget, next_id);
    const RollupResult r = level_rollup(root, kDefault);
    for (std::size_t s = 1; s < r.levels.size(); ++s) {
      NEED(r.levels[s].total >= r.levels[s - 1].total - 1e-9);
      NEED(r.levels[s].total <= r.cap + 1e-9);
    }
    for (const ParentGain& g : r.gains) {
      NEED(g.gain >= -1e-9);
    }
  }
  NEED(seconds_since(start) < 10.0);
}

void criterion_representation() {
  std::mt19937_64 rng(107);
  const double phi0 = kDefault.phi_zero();

  for (int i = 0; i < 2000; ++i) {
    const SessionSnapshot snap = gen::snapshot(rng, 2 + (rng() % 8));
    const ScoreBreakdown b = score_session(snap, kDefault);
    const double tau = 0.01 + gen::unit(rng);
    const DizzinessVerdict v = dizziness_scan(b, nullptr, tau, 0.05);
    if (v.tau_dizzy) NEED(b.active_count >= v.min_active_bound - 1e-12);
  }

  {
    MemoryTrace t = make_memory_trace(2, 0.75, kDefault);
    const double cap = t.cap();
    std::vector<double> rises(2);
    for (int step = 0; step < 100000; ++step) {
      for (double& r : rises) {
        r = (rng() % 4 == 0) ? phi0 * gen::unit(rng) : phi0;
      }
      t = memory_trace_step(t, rises);
      NEED(t.values[0] <= cap && t.values[1] <= cap);
    }
  }

  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 2 + (rng() % 6);
    const ScoreBreakdown b = score_session(gen::snapshot(rng, m), kDefault);
    MemoryTrace t =
        make_memory_trace(m, 0.25 + 0.5 * gen::unit(rng), kDefault);
    for (int step = 0; step < 4; ++step) {
      std::vector<double> rises(m);
      for (double& r : rises) r = phi0 * gen::unit(rng);
      t = memory_trace_step(t, rises);
    }
    const SequentialityResult s = sequentiality(b, t, 0.01 + gen::unit(rng));
    NEED(s.consec >= s.bound_lhs - 1e-9);
  }

  for (int i = 0; i < 500; ++i) {
    const std::size_t m = 2 + (rng() % 4);
    RationalPrior prior;
    prior.r = gen::simplex(rng, m);
    prior.eta_smoothing = 0.0;
    std::vector<double> habit = gen::simplex(rng, m);
    const MemoryTrace t = trace_of(habit, 0.5);
    const double on_law =
        reason_score(exact_shares_breakdown(prior.r), t, prior);
    NEED(on_law >= 0.0);
    const double on_habit =
        reason_score(exact_shares_breakdown(habit), t, prior);
    NEED(on_habit <= 0.0);
  }

  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 2 + (rng() % 6);
    SessionSnapshot snap = gen::snapshot(rng, m);
    std::vector<std::size_t> rational;
    double beta = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (rng() % 2 == 0) {
        snap.channels[k].x = 0.05 + 0.95 * snap.channels[k].x;
        rational.push_back(k);
        beta = std::min(beta, snap.channels[k].x);
      }
    }
    if (rational.empty()) continue;
    const TruthFloorCaps caps =
        truth_floor_caps(snap, rational, beta, kDefault);
    const double total = score_session(snap, kDefault).total;
    NEED(total <= caps.pointwise_cap + 1e-9);
    NEED(total <= caps.alpha_mass_cap + 1e-9);
    if (caps.p_mass_cap) NEED(total <= *caps.p_mass_cap + 1e-9);
  }
}

void criterion_coherence() {
  std::mt19937_64 rng(108);

  for (int i = 0; i < 2000; ++i) {
    SessionSnapshot snap;
    snap.weights = {0.5, 0.5};
    snap.channels = {ChannelState{gen::unit(rng), 0.0},
                     ChannelState{gen::unit(rng), 0.0}};
    ContradictionConfig config;
    config.zeta = 0.9 * gen::unit(rng);
    config.pairs = {{0, 1, 0.5 + gen::unit(rng)}};
    const double joint = std::min(snap.channels[0].x, snap.channels[1].x);
    const double penalty = pc_penalty(snap, config, kDefault).penalty;
    if (joint <= config.zeta) {
      NEED(penalty == 0.0);
    } else {
      NEED(penalty > 0.0);
    }
  }

  {
    ContradictionConfig config;
    config.pairs = {{0, 1, 1.0}};
    for (int i = 0; i < 1000; ++i) {
      const double total = 0.05 + 1.9 * gen::unit(rng);
      double a = std::clamp(total * gen::unit(rng),
                            std::max(0.0, total - 1.0), std::min(1.0, total));
      SessionSnapshot even;
      even.weights = {0.5, 0.5};
      even.channels = {ChannelState{total / 2, 0.0},
                       ChannelState{total / 2, 0.0}};
      SessionSnapshot uneven;
      uneven.weights = {0.5, 0.5};
      uneven.channels = {ChannelState{a, 0.0},
                         ChannelState{total - a, 0.0}};
      NEED(pc_penalty(even, config, kDefault).penalty >=
           pc_penalty(uneven, config, kDefault).penalty - 1e-12);
    }
  }

  for (int i = 0; i < 500; ++i) {
    const std::size_t m = 1 + (rng() % 4);
    SessionSnapshot snap = gen::snapshot(rng, m, 0, false);
    std::vector<double> prev(m);
    CausalNetwork net;
    net.inertia.assign(m, 1.0);
    net.edges.assign(m, std::vector<double>(m, 0.0));
    const bool covered = rng() % 2 == 0;
    for (std::size_t k = 0; k < m; ++k) prev[k] = snap.channels[k].x;
    if (!covered) {
      snap.channels[0].x = 0.5 + 0.5 * gen::unit(rng);
      prev[0] = snap.channels[0].x * 0.5;
    }
    const double penalty = psr_penalty(snap, prev, net, kDefault).penalty;
    if (covered) {
      NEED(penalty == 0.0);
    } else {
      NEED(penalty > 0.0);
    }
  }

  {
    SessionSnapshot snap;
    snap.weights = {1.0};
    snap.channels = {ChannelState{0.5, 0.0}};
    const std::vector<double> prev{0.0};
    double last = 0.0;
    for (double delta : {1e-2, 1e-4, 1e-6}) {
      CausalNetwork net;
      net.inertia = {0.0};
      net.edges = {{0.0}};
      net.delta = delta;
      const double penalty = psr_penalty(snap, prev, net, kDefault).penalty;
      NEED(penalty > last);
      last = penalty;
    }
    NEED(last < oracle::kPhi0);
    NEED(oracle::kPhi0 - last < 1e-3);

    CausalNetwork net;
    net.inertia = {0.5};
    net.edges = {{0.0}};
    const std::vector<double> held{0.4};
    double prior_penalty = -1.0;
    for (double x : {0.3, 0.5, 0.7, 0.9}) {
      SessionSnapshot s;
      s.weights = {1.0};
      s.channels = {ChannelState{x, 0.0}};
      const double penalty = psr_penalty(s, held, net, kDefault).penalty;
      NEED(penalty > prior_penalty);
      prior_penalty = penalty;
    }
  }

  for (int i = 0; i < 200; ++i) {
    SessionSnapshot session;
    session.weights = {0.25, 0.25, 0.25, 0.25};
    const double xa = gen::unit(rng);
    const double xb = gen::unit(rng);
    session.channels = {ChannelState{xa, 0.0}, ChannelState{xb, 0.0},
                        ChannelState{xa, 0.0}, ChannelState{xb, 0.0}};
    ViewPairing pairing;
    pairing.soul_channels = {0, 1};
    pairing.body_channels = {2, 3};
    pairing.pairing = {0, 1};
    NEED(harmony_penalty(session, session, pairing, kDefault).harm == 0.0);

    SessionSnapshot now;
    now.weights = {0.5, 0.5};
    now.channels = {ChannelState{0.5 * gen::unit(rng), 0.0},
                    ChannelState{0.5 * gen::unit(rng), 0.0}};
    SessionSnapshot next = now;
    next.channels[0].x += 0.1;
    next.channels[1].x += 0.1;
    const std::vector<double> targets{1.0, 1.0};
    NEED(alignment_penalty(now, next, targets, kDefault).harm == 0.0);
  }
}

void criterion_whole_part() {
  std::mt19937_64 rng(109);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 2 + (rng() % 5);
    const std::size_t steps = 1 + (rng() % 5);
    std::vector<SessionSnapshot> stream;
    for (std::size_t t = 0; t < steps; ++t) {
      stream.push_back(gen::snapshot(rng, m, static_cast<int>(t), false));
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t cut = 1 + (rng() % (m - 1));
    GroupingView view;
    view.groups.resize(2);
    view.groups[0].id = "a";
    view.groups[0].channels.assign(order.begin(), order.begin() + cut);
    view.groups[1].id = "b";
    view.groups[1].channels.assign(order.begin() + cut, order.end());
    std::sort(view.groups[0].channels.begin(), view.groups[0].channels.end());
    std::sort(view.groups[1].channels.begin(), view.groups[1].channels.end());
    view.window = 1 + (rng() % steps);

    std::vector<double> global_r(m);
    std::vector<double> group_r(m);
    for (std::size_t k = 0; k < m; ++k) {
      global_r[k] = gen::unit(rng);
      group_r[k] = global_r[k] * gen::unit(rng);
    }
    const WholePartResult r =
        whole_part_check(stream, view, global_r, group_r, kDefault);
    NEED(r.global_mean <= r.parts_mean + 1e-9);
    NEED(r.bound_peak_share <= r.global_mean + 1e-9);
    NEED(r.bound_min_score <= r.global_mean + 1e-9);
  }
}

void criterion_boundaries() {
  {
    const auto start = Clock::now();
    ScenarioSpec spec;
    spec.scenario = Scenario::appetition;
    const SessionFile file = generate_synthetic(spec);
    const JusticeReport r =
        justice_harness(file.snapshots, 0.5, KernelConfig{file.epsilon});
    NEED(r.final_score < 1e-8);
    NEED(r.final_perfection > 1.0 - 1e-8);
    NEED(r.monotone_nonincreasing);
    NEED(seconds_since(start) < 1.0);
  }
  {
    const auto start = Clock::now();
    ScenarioSpec spec;
    spec.scenario = Scenario::degradation;
    const SessionFile file = generate_synthetic(spec);
    const JusticeReport r =
        justice_harness(file.snapshots, 0.5, KernelConfig{file.epsilon});
    NEED(std::abs(r.cap - 6.65821) < 1e-4);
    NEED(r.cap - r.final_score < 1e-6);
    NEED(r.final_score <= r.cap);
    NEED(r.monotone_nondecreasing);
    NEED(seconds_since(start) < 1.0);
  }
}

void criterion_cli_determinism(const std::string& cli,
                               const std::string& config_dir) {
  NEED(!cli.empty());
  NEED(!config_dir.empty());
  const std::string config = config_dir + "/all_clauses.json";
  const std::string out_a = "/tmp/aas_accept_a.jsonl";
  const std::string out_b = "/tmp/aas_accept_b.jsonl";
  const std::string pipeline = "'" + cli + "' generate --seed 42 - | '" +
                               cli + "' score --config '" + config + "' -";
  NEED(std::system((pipeline + " > " + out_a).c_str()) == 0);
  NEED(std::system((pipeline + " > " + out_b).c_str()) == 0);
  const std::string a = read_file(out_a);
  const std::string b = read_file(out_b);
  NEED(!a.empty());
  NEED(a == b);
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::string config_dir;
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli") cli = argv[++i];
    else if (arg == "--config-dir") config_dir = argv[++i];
  }

  int failures = 0;
  const auto run = [&failures](int n, const char* what, auto&& fn) {
    try {
      fn();
      std::printf("[PASS] criterion %d: %s\n", n, what);
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] criterion %d: %s (%s)\n", n, what, e.what());
    }
    std::fflush(stdout);
  };

  run(1, "kernel landmarks hold and 10000 random snapshots stay bounded in under a second",
      criterion_kernel);
  run(2, "refinement, permutation, and metadata noise never move a total beyond 1e-12 relative",
      criterion_invariance);
  run(3, "windowless audits pass with zero diffs on 100 random streams",
      criterion_windowless);
  run(4, "planted clones are fully recovered and merges preserve totals to 1e-9",
      criterion_dedup);
  run(5, "goal-directed steps honor the guaranteed drop and the per-channel rate envelope",
      criterion_rate);
  run(6, "jensen gaps stay nonnegative and hierarchy level chains stay monotone in under ten seconds",
      criterion_hierarchy_chain);
  run(7, "attention floors, trace caps, habit bounds, reason signs, and floor caps all hold",
      criterion_representation);
  run(8, "coherence penalties vanish exactly on their zero sets and sharpen monotonically",
      criterion_coherence);
  run(9, "the whole never out-scores its parts and both lower bounds stay under the whole",
      criterion_whole_part);
  run(10, "boundary scenarios reach zero and the cap within tolerance in under a second each",
      criterion_boundaries);
  run(11, "a seeded generate-and-score pipeline emits byte-identical reports on repeat",
      [&] { criterion_cli_determinism(cli, config_dir); });

  return failures == 0 ? 0 : 1;
}
