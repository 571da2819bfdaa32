#include <doctest.h>

#include <cmath>
#include <random>

#include "aas/dynamics.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace aas;

namespace {

constexpr double kTight = 1e-12;
const KernelConfig kDefault{};

double inv_phi(double y, double eps = 0.01) {
  return (1.0 + eps) / std::exp2(y) - eps;
}

SessionSnapshot single(double x, std::int64_t t = 0) {
  SessionSnapshot snap;
  snap.t = t;
  snap.weights = {1.0};
  snap.channels = {ChannelState{x, 0.0}};
  return snap;
}

}  // namespace

TEST_CASE("rate cap landmarks") {
  CHECK(rate_cap(kDefault, 0.0, 0.0).cap == 0.0);
  CHECK(std::abs(rate_cap(kDefault, 0.1, 0.0).cap - oracle::kRateCapLx01) <
        kTight);
  CHECK(std::abs(rate_cap(kDefault, 0.0, 1.0).cap - oracle::kPhi0) < kTight);
}

TEST_CASE("constant stream raises no violations") {
  std::vector<SessionSnapshot> stream;
  for (int t = 0; t < 6; ++t) stream.push_back(single(0.4, t));
  const RateCheckReport rep =
      rate_check(stream, rate_cap(kDefault, 0.1, 0.0), 1.0);
  CHECK(rep.clean());
  CHECK(rep.flatlines.empty());  // nothing moved underneath either
}

TEST_CASE("a full attainment collapse trips only a tight enough cap") {
  const std::vector<SessionSnapshot> stream{single(1.0, 0), single(0.0, 1)};
  // Delta S = phi(0) = 6.658; the L_x = 0.1 cap (14.427) tolerates it.
  CHECK(rate_check(stream, rate_cap(kDefault, 0.1, 0.0), 1.0).clean());
  // The L_x = 0.01 cap (1.4427) does not.
  const RateCheckReport rep =
      rate_check(stream, rate_cap(kDefault, 0.01, 0.0), 1.0);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].from_index == 0);
  CHECK(std::abs(rep.violations[0].delta - oracle::kPhi0) < kTight);
}

TEST_CASE("streams generated inside the Lipschitz budget never flag") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const double l_x = 0.01 + 0.2 * gen::unit(rng);
    const double l_r = 0.05 * gen::unit(rng);
    const auto stream =
        gen::lipschitz_stream(rng, 1 + (rng() % 5), 8, l_x, l_r);
    CHECK(rate_check(stream, rate_cap(kDefault, l_x, l_r), 1.0).clean());
  }
}

TEST_CASE("opposed channel moves that freeze the total are reported") {
  // Two channels, constructed so c0 + c1 is constant while both move.
  const double k2 =
      eval_kernel(0.5, kDefault) + eval_kernel(0.7, kDefault);  // 2K
  std::vector<SessionSnapshot> stream;
  const double x1_path[5] = {0.5, 0.46, 0.42, 0.39, 0.36};
  for (int t = 0; t < 5; ++t) {
    SessionSnapshot snap;
    snap.t = t;
    snap.weights = {0.5, 0.5};
    const double x1 = x1_path[t];
    const double x2 = inv_phi(k2 - eval_kernel(x1, kDefault));
    snap.channels = {ChannelState{x1, 0.0}, ChannelState{x2, 0.0}};
    stream.push_back(snap);
  }
  const RateCheckReport rep =
      rate_check(stream, rate_cap(kDefault, 1.0, 1.0), 1.0);
  REQUIRE(rep.flatlines.size() == 1);
  CHECK(rep.flatlines[0].begin == 0);
  CHECK(rep.flatlines[0].end == 4);
  CHECK(rep.flatlines[0].max_channel_delta > 1e-6);
}

TEST_CASE("appetition with zero step is the identity") {
  const SessionSnapshot snap = single(0.4);
  const AppetitionResult r =
      appetition_step(snap, AppetitionCommand{{1.0}, {0.0}}, kDefault);
  CHECK(r.next.channels[0].x == snap.channels[0].x);
  CHECK(r.next.t == snap.t + 1);
  CHECK(r.magnitude == 0.0);
  CHECK(r.guaranteed_drop == 0.0);
}

TEST_CASE("appetition quarter-step toward full attainment") {
  const SessionSnapshot snap = single(0.4);
  const AppetitionResult r =
      appetition_step(snap, AppetitionCommand{{1.0}, {0.25}}, kDefault);
  CHECK(std::abs(r.next.channels[0].x - 0.55) < kTight);
  CHECK(std::abs(r.magnitude - 0.15) < kTight);
  CHECK(std::abs(r.guaranteed_drop - oracle::kGuaranteedDrop) < kTight);
  const double actual = score_session(snap, kDefault).total -
                        score_session(r.next, kDefault).total;
  CHECK(std::abs(actual - oracle::kActualDrop) < 1e-10);
  CHECK(actual >= r.guaranteed_drop);
}

TEST_CASE("benevolent steps drop at least the convexity guarantee") {
  std::mt19937_64 rng(32);
  const double lip = 1.0 / (kDefault.epsilon * std::log(2.0));
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + (rng() % 4);
    const SessionSnapshot snap = gen::snapshot(rng, m);
    AppetitionCommand cmd;
    cmd.targets.resize(m);
    cmd.steps.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double x = snap.channels[k].x;
      cmd.targets[k] = x + (1.0 - x) * gen::unit(rng);  // improving target
      cmd.steps[k] = gen::unit(rng);
    }
    const AppetitionResult r = appetition_step(snap, cmd, kDefault);
    const double drop = score_session(snap, kDefault).total -
                        score_session(r.next, kDefault).total;
    CHECK(drop >= r.guaranteed_drop - 1e-9);
    // Per-channel kernel moves stay inside the linear envelope.
    for (std::size_t k = 0; k < m; ++k) {
      const double dphi =
          std::abs(eval_kernel(r.next.channels[k].x, kDefault) -
                   eval_kernel(snap.channels[k].x, kDefault));
      const double budget =
          cmd.steps[k] * std::abs(cmd.targets[k] - snap.channels[k].x);
      CHECK(dphi <= lip * budget + 1e-9);
    }
  }
}

TEST_CASE("appetition validates its command") {
  const SessionSnapshot snap = single(0.4);
  CHECK_THROWS_AS(
      appetition_step(snap, AppetitionCommand{{1.0, 1.0}, {0.1}}, kDefault),
      std::invalid_argument);
  CHECK_THROWS_AS(
      appetition_step(snap, AppetitionCommand{{1.4}, {0.1}}, kDefault),
      std::domain_error);
  CHECK_THROWS_AS(
      appetition_step(snap, AppetitionCommand{{1.0}, {1.4}}, kDefault),
      std::domain_error);
}

TEST_CASE("constant trajectory has zero gap and flat time entropy") {
  std::vector<SessionSnapshot> stream;
  for (int t = 0; t < 3; ++t) {
    SessionSnapshot snap;
    snap.t = t;
    snap.weights = {0.5, 0.5};
    snap.channels = {ChannelState{0.5, 0.0}, ChannelState{0.5, 0.0}};
    stream.push_back(snap);
  }
  const TrajectoryMetrics m = trajectory_metrics(stream, kDefault);
  CHECK(std::abs(m.channels[0].jensen_gap) < kTight);
  CHECK(std::abs(m.channels[0].time_entropy - std::log2(3.0)) < kTight);
  CHECK(std::abs(m.channels[0].mass - 1.5) < kTight);
}

TEST_CASE("two-point trajectory reproduces the convexity gap") {
  std::vector<SessionSnapshot> stream;
  const double xs[2] = {0.2, 0.8};
  for (int t = 0; t < 2; ++t) {
    SessionSnapshot snap;
    snap.t = t;
    snap.weights = {0.5, 0.5};
    snap.channels = {ChannelState{xs[t], 0.0}, ChannelState{1.0, 0.0}};
    stream.push_back(snap);
  }
  const TrajectoryMetrics m = trajectory_metrics(stream, kDefault);
  CHECK(std::abs(m.channels[0].cumulative_cost - oracle::kJensenSum) < kTight);
  CHECK(std::abs(m.channels[0].jensen_gap - oracle::kJensenGap) < kTight);
  REQUIRE(m.channels[0].weighted_mean_x.has_value());
  CHECK(std::abs(*m.channels[0].weighted_mean_x - 0.5) < kTight);
}

TEST_CASE("a single cost spike has zero time entropy") {
  std::vector<SessionSnapshot> stream;
  for (int t = 0; t < 4; ++t) {
    SessionSnapshot snap;
    snap.t = t;
    snap.weights = {1.0};
    snap.channels = {ChannelState{t == 2 ? 0.3 : 1.0, 0.0}};
    stream.push_back(snap);
  }
  const TrajectoryMetrics m = trajectory_metrics(stream, kDefault);
  CHECK(m.channels[0].time_entropy == 0.0);
}

TEST_CASE("jensen gap is nonnegative on random streams") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 1000; ++i) {
    const auto stream = gen::lipschitz_stream(rng, 1 + (rng() % 4),
                                              2 + (rng() % 6), 0.3, 0.1);
    const TrajectoryMetrics m = trajectory_metrics(stream, kDefault);
    for (const ChannelTrajectoryMetrics& ch : m.channels) {
      CHECK(ch.jensen_gap >= -1e-12);
    }
  }
}

TEST_CASE("trajectory distance separates channels by their cost paths") {
  std::mt19937_64 rng(34);
  std::vector<SessionSnapshot> stream;
  for (int t = 0; t < 4; ++t) {
    SessionSnapshot snap = gen::snapshot(rng, 3, t);
    snap.channels[1] = snap.channels[0];
    snap.weights[1] = snap.weights[0];
    // Re-close the simplex on the last channel.
    snap.weights[2] = 1.0 - snap.weights[0] - snap.weights[1];
    if (snap.weights[2] < 0.0) snap.weights[2] = 0.0;
    double tot = snap.weights[0] + snap.weights[1] + snap.weights[2];
    for (double& w : snap.weights) w /= tot;
    snap.weights[1] = snap.weights[0];  // keep the clone exact
    snap.weights[2] = 1.0 - 2.0 * snap.weights[0];
    stream.push_back(snap);
  }
  CHECK(trajectory_distance(stream, 0, 0, kDefault) == 0.0);
  CHECK(trajectory_distance(stream, 0, 1, kDefault) == 0.0);
  CHECK(trajectory_distance(stream, 0, 2, kDefault) > 0.0);
}

TEST_CASE("trajectory distance sums absolute cost gaps") {
  // Engineered costs: channel 0 pays (0.3, 0.3), channel 1 pays (0.1, 0.5).
  std::vector<SessionSnapshot> stream;
  const double c0[2] = {0.3, 0.3};
  const double c1[2] = {0.1, 0.5};
  for (int t = 0; t < 2; ++t) {
    SessionSnapshot snap;
    snap.t = t;
    snap.weights = {0.5, 0.5};
    snap.channels = {ChannelState{inv_phi(c0[t] / 0.5), 0.0},
                     ChannelState{inv_phi(c1[t] / 0.5), 0.0}};
    stream.push_back(snap);
  }
  CHECK(std::abs(trajectory_distance(stream, 0, 1, kDefault) - 0.4) < 1e-9);
}

TEST_CASE("replay audit accepts worlds that differ only off-shared") {
  std::mt19937_64 rng(35);
  std::vector<SessionSnapshot> world_a;
  for (int t = 0; t < 5; ++t) world_a.push_back(gen::snapshot(rng, 4, t));
  std::vector<SessionSnapshot> world_b = world_a;
  for (SessionSnapshot& snap : world_b) {
    snap.channels[3].x = gen::unit(rng);  // only channel 3 differs
  }
  const std::vector<std::size_t> shared{0, 1, 2};

  SUBCASE("identical worlds") {
    const AuditReport rep =
        internality_replay_audit(world_a, world_a, shared, kDefault);
    CHECK(rep.passed());
    for (const AuditFinding& f : rep.findings) CHECK(f.max_abs_diff == 0.0);
  }
  SUBCASE("difference confined to the free channel") {
    const AuditReport rep =
        internality_replay_audit(world_a, world_b, shared, kDefault);
    CHECK(rep.passed());
  }
  SUBCASE("tampered shared channel is caught") {
    world_b[2].channels[1].x += world_b[2].channels[1].x < 0.5 ? 0.2 : -0.2;
    const AuditReport rep =
        internality_replay_audit(world_a, world_b, shared, kDefault);
    CHECK_FALSE(rep.passed());
  }
}
