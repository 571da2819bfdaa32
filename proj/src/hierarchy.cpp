#include "aas/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace aas {
namespace {

void validate_node(const HierarchyNode& node, std::set<std::string>& ids) {
  if (node.id.empty()) {
    throw std::invalid_argument("hierarchy node id empty");
  }
  if (!ids.insert(node.id).second) {
    throw std::invalid_argument("hierarchy node id duplicated: " + node.id);
  }
  if (!(node.alpha >= 0.0)) {
    throw std::invalid_argument("hierarchy node mass negative");
  }
  if (node.is_leaf()) {
    if (!(node.x >= 0.0 && node.x <= 1.0)) {
      throw std::invalid_argument("leaf attainment outside [0,1]");
    }
    return;
  }
  double child_mass = 0.0;
  for (const HierarchyNode& child : node.children) {
    validate_node(child, ids);
    child_mass += child.alpha;
  }
  if (std::abs(child_mass - node.alpha) > kWeightSumTol) {
    throw std::invalid_argument("hierarchy mass not partitioned at " +
                                node.id);
  }
}

std::size_t tree_depth(const HierarchyNode& node) {
  std::size_t d = 0;
  for (const HierarchyNode& child : node.children) {
    d = std::max(d, 1 + tree_depth(child));
  }
  return d;
}

void collect_gains(const HierarchyNode& node, const KernelConfig& cfg,
                   std::vector<ParentGain>& gains) {
  if (node.is_leaf()) {
    return;
  }
  const double parent_phi = eval_kernel(derived_attainment(node), cfg);
  double gain = 0.0;
  for (const HierarchyNode& child : node.children) {
    gain += child.alpha *
            (eval_kernel(derived_attainment(child), cfg) - parent_phi);
  }
  gains.push_back(ParentGain{node.id, gain});
  for (const HierarchyNode& child : node.children) {
    collect_gains(child, cfg, gains);
  }
}

void validate_group(const GroupNode& node, std::size_t arity,
                    std::set<std::string>& ids) {
  if (node.id.empty()) {
    throw std::invalid_argument("group id empty");
  }
  if (!ids.insert(node.id).second) {
    throw std::invalid_argument("group id duplicated: " + node.id);
  }
  if (node.channels.empty()) {
    throw std::invalid_argument("group has no channels: " + node.id);
  }
  for (std::size_t i = 0; i < node.channels.size(); ++i) {
    if (node.channels[i] >= arity) {
      throw std::invalid_argument("group channel out of range: " + node.id);
    }
    if (i > 0 && node.channels[i] <= node.channels[i - 1]) {
      throw std::invalid_argument("group channels not ascending: " + node.id);
    }
  }
  if (node.subgroups.empty()) {
    return;
  }
  std::vector<std::size_t> covered;
  for (const GroupNode& sub : node.subgroups) {
    validate_group(sub, arity, ids);
    covered.insert(covered.end(), sub.channels.begin(), sub.channels.end());
  }
  std::sort(covered.begin(), covered.end());
  if (covered != node.channels) {
    throw std::invalid_argument("subgroups do not partition " + node.id);
  }
}

double group_cost(const ScoreBreakdown& b, const GroupNode& g) {
  double s = 0.0;
  for (std::size_t i : g.channels) {
    s += b.contributions[i];
  }
  return s;
}

void collect_split_entropy(const GroupNode& node, const ScoreBreakdown& b,
                           std::map<std::string, std::vector<double>>& out) {
  if (node.subgroups.empty()) {
    return;
  }
  const double own = group_cost(b, node);
  std::vector<double> shares;
  shares.reserve(node.subgroups.size());
  for (const GroupNode& sub : node.subgroups) {
    shares.push_back(own > 0.0 ? group_cost(b, sub) / own : 0.0);
  }
  out[node.id].push_back(entropy_bits(shares));
  for (const GroupNode& sub : node.subgroups) {
    collect_split_entropy(sub, b, out);
  }
}

}  // namespace

void HierarchyNode::validate() const {
  std::set<std::string> ids;
  validate_node(*this, ids);
}

double derived_attainment(const HierarchyNode& node) {
  if (node.is_leaf()) {
    return node.x;
  }
  if (node.alpha <= 0.0) {
    return 1.0;
  }
  double weighted = 0.0;
  for (const HierarchyNode& child : node.children) {
    weighted += child.alpha * derived_attainment(child);
  }
  return weighted / node.alpha;
}

RollupResult level_rollup(const HierarchyNode& root, const KernelConfig& cfg) {
  root.validate();
  cfg.validate();
  RollupResult out;
  out.mass = root.alpha;
  out.cap = root.alpha * cfg.phi_zero();
  out.depth = tree_depth(root);

  // Leaves persist below their own depth so every level carries the full
  // mass and totals stay comparable.
  std::vector<const HierarchyNode*> level{&root};
  for (std::size_t s = 0; s <= out.depth; ++s) {
    LevelStat stat;
    std::vector<double> costs;
    costs.reserve(level.size());
    for (const HierarchyNode* node : level) {
      const double c =
          node->alpha * eval_kernel(derived_attainment(*node), cfg);
      costs.push_back(c);
      stat.total += c;
      if (c > 0.0) {
        ++stat.active_count;
      }
    }
    if (stat.total > 0.0) {
      for (double& c : costs) {
        c /= stat.total;
      }
      stat.entropy_bits = entropy_bits(costs);
    }
    out.levels.push_back(stat);

    std::vector<const HierarchyNode*> next;
    for (const HierarchyNode* node : level) {
      if (node->is_leaf()) {
        next.push_back(node);
      } else {
        for (const HierarchyNode& child : node->children) {
          next.push_back(&child);
        }
      }
    }
    level = std::move(next);
  }

  collect_gains(root, cfg, out.gains);

  out.organic = out.depth >= 1;
  for (std::size_t s = 1; s <= out.depth && out.organic; ++s) {
    out.organic = out.levels[s].active_count >= 1 &&
                  out.levels[s].entropy_bits > 0.0;
  }
  return out;
}

void GroupingView::validate(std::size_t arity) const {
  if (groups.empty()) {
    throw std::invalid_argument("grouping view has no groups");
  }
  if (window == 0) {
    throw std::invalid_argument("grouping window must be >= 1");
  }
  if (!(dominance_margin >= 0.0)) {
    throw std::invalid_argument("dominance margin negative");
  }
  std::set<std::string> ids;
  std::vector<std::size_t> covered;
  for (const GroupNode& g : groups) {
    validate_group(g, arity, ids);
    covered.insert(covered.end(), g.channels.begin(), g.channels.end());
  }
  std::sort(covered.begin(), covered.end());
  std::vector<std::size_t> want(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    want[i] = i;
  }
  if (covered != want) {
    throw std::invalid_argument("groups do not partition the channels");
  }
}

DominanceScan dominance_scan(std::span<const SessionSnapshot> stream,
                             const GroupingView& view,
                             const KernelConfig& cfg) {
  cfg.validate();
  if (stream.empty()) {
    throw std::invalid_argument("dominance scan needs >= 1 snapshot");
  }
  view.validate(stream.front().arity());

  DominanceScan scan;
  const std::size_t n_groups = view.groups.size();
  for (const SessionSnapshot& snap : stream) {
    if (snap.arity() != stream.front().arity()) {
      throw std::invalid_argument("stream arity mismatch");
    }
    const ScoreBreakdown b = score_session(snap, cfg);
    std::vector<double> shares(n_groups, 0.0);
    if (b.total > 0.0) {
      for (std::size_t g = 0; g < n_groups; ++g) {
        shares[g] = group_cost(b, view.groups[g]) / b.total;
      }
    }
    scan.group_entropy.push_back(entropy_bits(shares));
    if (b.total > 0.0) {
      std::size_t best = 0;
      for (std::size_t g = 1; g < n_groups; ++g) {
        if (shares[g] > shares[best]) {
          best = g;  // ties keep the lowest id
        }
      }
      bool tied = false;
      for (std::size_t g = 0; g < n_groups; ++g) {
        if (g != best && shares[g] == shares[best]) {
          tied = true;
        }
      }
      scan.dominant.push_back(best);
      scan.tie.push_back(tied);
    } else {
      scan.dominant.push_back(std::nullopt);
      scan.tie.push_back(false);
    }
    scan.shares.push_back(std::move(shares));
    for (const GroupNode& g : view.groups) {
      collect_split_entropy(g, b, scan.split_entropy);
    }
  }

  const std::size_t window = std::min(view.window, stream.size());
  scan.windowed_mean_share.assign(n_groups, 0.0);
  for (std::size_t t = stream.size() - window; t < stream.size(); ++t) {
    for (std::size_t g = 0; g < n_groups; ++g) {
      scan.windowed_mean_share[g] += scan.shares[t][g];
    }
  }
  for (double& v : scan.windowed_mean_share) {
    v /= static_cast<double>(window);
  }

  std::size_t star = 0;
  for (std::size_t g = 1; g < n_groups; ++g) {
    if (scan.windowed_mean_share[g] > scan.windowed_mean_share[star]) {
      star = g;
    }
  }
  bool stable = n_groups >= 1;
  for (std::size_t g = 0; g < n_groups; ++g) {
    if (g != star && !(scan.windowed_mean_share[star] >=
                       scan.windowed_mean_share[g] + view.dominance_margin)) {
      stable = false;
    }
  }
  if (stable) {
    scan.stable_dominant = star;
  }
  return scan;
}

WholePartResult whole_part_check(std::span<const SessionSnapshot> stream,
                                 const GroupingView& view,
                                 std::span<const double> global_r,
                                 std::span<const double> group_r,
                                 const KernelConfig& cfg) {
  cfg.validate();
  if (stream.empty()) {
    throw std::invalid_argument("whole-part check needs >= 1 snapshot");
  }
  const std::size_t m = stream.front().arity();
  view.validate(m);
  if (global_r.size() != m || group_r.size() != m) {
    throw std::invalid_argument("redundancy vector arity mismatch");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(global_r[i] >= 0.0 && global_r[i] <= 1.0) ||
        !(group_r[i] >= 0.0 && group_r[i] <= 1.0)) {
      throw std::invalid_argument("redundancy outside [0,1]");
    }
    if (group_r[i] > global_r[i]) {
      throw std::invalid_argument(
          "within-group redundancy exceeds the global one");
    }
  }

  const std::size_t n_groups = view.groups.size();
  std::vector<double> global_totals;   // per t, R := global_r
  std::vector<double> parts_totals;    // per t, R := group_r, summed by group
  std::vector<std::vector<double>> group_scores(n_groups);  // global-R S_t(G)
  std::vector<std::vector<double>> group_shares(n_groups);
  for (const SessionSnapshot& snap : stream) {
    if (snap.arity() != m) {
      throw std::invalid_argument("stream arity mismatch");
    }
    SessionSnapshot as_whole = snap;
    SessionSnapshot as_parts = snap;
    for (std::size_t i = 0; i < m; ++i) {
      as_whole.channels[i].R = global_r[i];
      as_parts.channels[i].R = group_r[i];
    }
    const ScoreBreakdown whole = score_session(as_whole, cfg);
    const ScoreBreakdown parts = score_session(as_parts, cfg);
    global_totals.push_back(whole.total);
    double parts_sum = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      parts_sum += group_cost(parts, view.groups[g]);
      const double sg = group_cost(whole, view.groups[g]);
      group_scores[g].push_back(sg);
      group_shares[g].push_back(whole.total > 0.0 ? sg / whole.total : 0.0);
    }
    parts_totals.push_back(parts_sum);
  }

  WholePartResult out;
  out.window = std::min(view.window, stream.size());
  const std::size_t from = stream.size() - out.window;

  std::vector<double> mean_share(n_groups, 0.0);
  for (std::size_t t = from; t < stream.size(); ++t) {
    out.global_mean += global_totals[t];
    out.parts_mean += parts_totals[t];
    for (std::size_t g = 0; g < n_groups; ++g) {
      mean_share[g] += group_shares[g][t];
    }
  }
  out.global_mean /= static_cast<double>(out.window);
  out.parts_mean /= static_cast<double>(out.window);
  for (double& v : mean_share) {
    v /= static_cast<double>(out.window);
  }

  std::size_t star = 0;
  for (std::size_t g = 1; g < n_groups; ++g) {
    if (mean_share[g] > mean_share[star]) {
      star = g;
    }
  }
  out.star_group = star;

  double min_share = 1.0;
  double min_score = group_scores[star][from];
  double mean_score = 0.0;
  for (std::size_t t = from; t < stream.size(); ++t) {
    min_share = std::min(min_share, group_shares[star][t]);
    min_score = std::min(min_score, group_scores[star][t]);
    mean_score += group_scores[star][t];
  }
  mean_score /= static_cast<double>(out.window);
  out.bound_peak_share = min_share * mean_score;
  out.bound_min_score = mean_share[star] * min_score;
  return out;
}

}  // namespace aas
