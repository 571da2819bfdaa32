#include "aas/clause_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aas {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config " + where + ": " + what);
}

double need_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    bad(where, std::string("missing numeric '") + key + "'");
  }
  return j[key].get<double>();
}

std::vector<double> need_numbers(const json& j, const char* key,
                                 const std::string& where) {
  if (!j.contains(key) || !j[key].is_array()) {
    bad(where, std::string("missing array '") + key + "'");
  }
  std::vector<double> out;
  for (const json& v : j[key]) {
    if (!v.is_number()) {
      bad(where, std::string("non-numeric entry in '") + key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> need_indices(const json& j, const char* key,
                                      const std::string& where) {
  if (!j.contains(key) || !j[key].is_array()) {
    bad(where, std::string("missing array '") + key + "'");
  }
  std::vector<std::size_t> out;
  for (const json& v : j[key]) {
    if (!v.is_number_unsigned()) {
      bad(where, std::string("non-index entry in '") + key + "'");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

bool section_enabled(const json& j) {
  return j.is_object() && j.value("enabled", true);
}

HierarchyNode parse_tree(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    bad(where, "tree node needs a string id");
  }
  HierarchyNode node;
  node.id = j["id"].get<std::string>();
  node.alpha = need_number(j, "alpha", where);
  if (j.contains("children")) {
    if (!j["children"].is_array()) {
      bad(where, "tree children must be an array");
    }
    for (const json& child : j["children"]) {
      node.children.push_back(parse_tree(child, where));
    }
  } else {
    node.x = need_number(j, "x", where);
  }
  return node;
}

GroupNode parse_group(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    bad(where, "group needs a string id");
  }
  GroupNode node;
  node.id = j["id"].get<std::string>();
  node.channels = need_indices(j, "channels", where);
  if (j.contains("subgroups")) {
    if (!j["subgroups"].is_array()) {
      bad(where, "subgroups must be an array");
    }
    for (const json& sub : j["subgroups"]) {
      node.subgroups.push_back(parse_group(sub, where));
    }
  }
  return node;
}

}  // namespace

void ClauseConfig::validate(std::size_t arity) const {
  if (epsilon && !(*epsilon > 0.0)) {
    throw std::invalid_argument("config epsilon: must be > 0");
  }
  if (audit) {
    for (const InsulationProbe& p : audit->perturbations) {
      if (p.channel >= arity) bad("audit", "perturbation channel out of range");
    }
  }
  if (dedup && !(dedup->tolerance >= 0.0)) {
    bad("dedup", "tolerance must be nonnegative");
  }
  if (rate) {
    if (!(rate->l_x >= 0.0) || !(rate->l_r >= 0.0)) {
      bad("rate", "Lipschitz constants must be nonnegative");
    }
    if (!(rate->dt > 0.0)) bad("rate", "dt must be > 0");
  }
  if (dizziness) {
    if (!(dizziness->tau > 0.0) || !(dizziness->delta > 0.0)) {
      bad("dizziness", "thresholds must be > 0");
    }
  }
  if (memory) {
    if (!(memory->lambda > 0.0 && memory->lambda < 1.0)) {
      bad("memory", "lambda must lie in (0,1)");
    }
    if (!(memory->tau > 0.0)) bad("memory", "tau must be > 0");
    if (!(memory->eta_smoothing > 0.0 && memory->eta_smoothing < 1.0)) {
      bad("memory", "eta_smoothing must lie in (0,1)");
    }
  }
  if (reason) {
    if (reason->prior.r.size() != arity) {
      bad("reason", "prior arity disagrees with the session");
    }
    try {
      reason->prior.validate();
    } catch (const std::exception& e) {
      bad("reason", e.what());
    }
  }
  if (truth_floor) {
    if (!(truth_floor->beta > 0.0 && truth_floor->beta <= 1.0)) {
      bad("truth_floor", "beta must lie in (0,1]");
    }
    for (std::size_t idx : truth_floor->rational_set) {
      if (idx >= arity) bad("truth_floor", "rational channel out of range");
    }
  }
  if (contradiction) {
    try {
      contradiction->validate(arity);
    } catch (const std::exception& e) {
      bad("contradiction", e.what());
    }
  }
  if (sufficient_reason) {
    try {
      sufficient_reason->net.validate();
    } catch (const std::exception& e) {
      bad("sufficient_reason", e.what());
    }
    if (sufficient_reason->net.edges.size() != arity) {
      bad("sufficient_reason", "network arity disagrees with the session");
    }
  }
  if (harmony) {
    const ViewPairing& p = harmony->pairing;
    std::set<std::size_t> soul(p.soul_channels.begin(), p.soul_channels.end());
    for (std::size_t i : p.soul_channels) {
      if (i >= arity) bad("harmony", "soul channel out of range");
    }
    for (std::size_t j : p.body_channels) {
      if (j >= arity) bad("harmony", "body channel out of range");
      if (soul.count(j)) {
        bad("harmony", "soul and body views must be disjoint");
      }
    }
    if (p.pairing.size() != p.body_channels.size()) {
      bad("harmony", "pairing must be total on the body view");
    }
    for (std::size_t target : p.pairing) {
      if (!soul.count(target)) bad("harmony", "pairing image leaves the soul view");
    }
  }
  if (alignment) {
    if (alignment->targets.size() != arity) {
      bad("alignment", "targets arity disagrees with the session");
    }
    for (double y : alignment->targets) {
      if (!(y > 0.0 && y <= 1.0)) bad("alignment", "target outside (0,1]");
    }
    if (!(alignment->dead_band >= 0.0)) bad("alignment", "dead band negative");
  }
  if (hierarchy) {
    try {
      hierarchy->tree.validate();
    } catch (const std::exception& e) {
      bad("hierarchy", e.what());
    }
  }
  if (grouping) {
    try {
      grouping->view.validate(arity);
    } catch (const std::exception& e) {
      bad("grouping", e.what());
    }
    if (grouping->global_r.size() != arity ||
        grouping->group_r.size() != arity) {
      bad("grouping", "redundancy vectors disagree with the session");
    }
    for (std::size_t i = 0; i < arity; ++i) {
      const double lo = grouping->group_r[i];
      const double hi = grouping->global_r[i];
      if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0) || lo > hi) {
        bad("grouping", "need 0 <= group_r <= global_r <= 1 per leaf");
      }
    }
  }
  if (perfection && !(perfection->gamma > 0.0 && perfection->gamma < 1.0)) {
    bad("perfection", "gamma must lie in (0,1)");
  }
  if (drift) {
    if (drift->window < 1 || drift->stride < 1) {
      bad("drift", "window and stride must be >= 1");
    }
    if (!(drift->eta > 0.0)) bad("drift", "eta must be > 0");
    if (drift->promote_after < 1 || drift->rollback_after < 1) {
      bad("drift", "governance run lengths must be >= 1");
    }
  }
}

ClauseConfig parse_config(const std::string& text, const std::string& source) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw std::invalid_argument("config " + source + ": not a JSON object");
  }
  ClauseConfig cfg;
  if (root.contains("epsilon")) {
    if (!root["epsilon"].is_number()) bad("epsilon", "must be a number");
    cfg.epsilon = root["epsilon"].get<double>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) bad("seed", "must be unsigned");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  const json clauses = root.value("clauses", json::object());
  if (!clauses.is_object()) {
    bad("clauses", "must be an object");
  }

  if (clauses.contains("audit") && section_enabled(clauses["audit"])) {
    const json& j = clauses["audit"];
    AuditSection s;
    if (j.contains("metadata_seed")) {
      s.metadata_seed = j["metadata_seed"].get<std::uint64_t>();
    }
    s.ghosts = j.value("ghosts", true);
    if (j.contains("perturb")) {
      for (const json& p : j["perturb"]) {
        s.perturbations.push_back(InsulationProbe{
            p.at("channel").get<std::size_t>(), p.at("dx").get<double>()});
      }
    }
    cfg.audit = std::move(s);
  }
  if (clauses.contains("dedup") && section_enabled(clauses["dedup"])) {
    DedupSection s;
    s.tolerance = clauses["dedup"].value("tolerance", 0.0);
    cfg.dedup = s;
  }
  if (clauses.contains("rate") && section_enabled(clauses["rate"])) {
    const json& j = clauses["rate"];
    RateSection s;
    s.l_x = need_number(j, "l_x", "rate");
    s.l_r = need_number(j, "l_r", "rate");
    s.dt = j.value("dt", 1.0);
    cfg.rate = s;
  }
  if (clauses.contains("dizziness") && section_enabled(clauses["dizziness"])) {
    const json& j = clauses["dizziness"];
    cfg.dizziness = DizzinessSection{need_number(j, "tau", "dizziness"),
                                     need_number(j, "delta", "dizziness")};
  }
  if (clauses.contains("memory") && section_enabled(clauses["memory"])) {
    const json& j = clauses["memory"];
    MemorySection s;
    s.lambda = need_number(j, "lambda", "memory");
    s.tau = need_number(j, "tau", "memory");
    s.eta_smoothing = j.value("eta_smoothing", kDefaultKlSmoothing);
    cfg.memory = s;
  }
  if (clauses.contains("reason") && section_enabled(clauses["reason"])) {
    const json& j = clauses["reason"];
    ReasonSection s;
    s.prior.r = need_numbers(j, "prior", "reason");
    s.prior.eta_smoothing = j.value("eta_smoothing", kDefaultKlSmoothing);
    s.law_fixity = j.value("law_fixity", true);
    cfg.reason = std::move(s);
  }
  if (clauses.contains("truth_floor") &&
      section_enabled(clauses["truth_floor"])) {
    const json& j = clauses["truth_floor"];
    TruthFloorSection s;
    s.rational_set = need_indices(j, "rational_set", "truth_floor");
    s.beta = need_number(j, "beta", "truth_floor");
    cfg.truth_floor = std::move(s);
  }
  if (clauses.contains("contradiction") &&
      section_enabled(clauses["contradiction"])) {
    const json& j = clauses["contradiction"];
    ContradictionConfig s;
    s.zeta = j.value("zeta", 0.0);
    if (j.contains("pairs")) {
      for (const json& p : j["pairs"]) {
        s.pairs.push_back(ContradictionPair{p.at("i").get<std::size_t>(),
                                            p.at("j").get<std::size_t>(),
                                            p.at("gamma").get<double>()});
      }
    }
    cfg.contradiction = std::move(s);
  }
  if (clauses.contains("sufficient_reason") &&
      section_enabled(clauses["sufficient_reason"])) {
    const json& j = clauses["sufficient_reason"];
    SufficientReasonSection s;
    s.net.delta = j.value("delta", 0.01);
    s.net.inertia = need_numbers(j, "inertia", "sufficient_reason");
    if (!j.contains("edges") || !j["edges"].is_array()) {
      bad("sufficient_reason", "missing array 'edges'");
    }
    for (const json& row : j["edges"]) {
      std::vector<double> r;
      for (const json& v : row) {
        r.push_back(v.get<double>());
      }
      s.net.edges.push_back(std::move(r));
    }
    cfg.sufficient_reason = std::move(s);
  }
  if (clauses.contains("harmony") && section_enabled(clauses["harmony"])) {
    const json& j = clauses["harmony"];
    HarmonySection s;
    s.pairing.soul_channels = need_indices(j, "soul", "harmony");
    s.pairing.body_channels = need_indices(j, "body", "harmony");
    s.pairing.pairing = need_indices(j, "pairing", "harmony");
    cfg.harmony = std::move(s);
  }
  if (clauses.contains("alignment") && section_enabled(clauses["alignment"])) {
    const json& j = clauses["alignment"];
    AlignmentSection s;
    s.targets = need_numbers(j, "targets", "alignment");
    s.dead_band = j.value("dead_band", 0.0);
    cfg.alignment = std::move(s);
  }
  if (clauses.contains("hierarchy") && section_enabled(clauses["hierarchy"])) {
    const json& j = clauses["hierarchy"];
    if (!j.contains("tree")) bad("hierarchy", "missing 'tree'");
    cfg.hierarchy = HierarchySection{parse_tree(j["tree"], "hierarchy")};
  }
  if (clauses.contains("grouping") && section_enabled(clauses["grouping"])) {
    const json& j = clauses["grouping"];
    GroupingSection s;
    if (!j.contains("groups") || !j["groups"].is_array()) {
      bad("grouping", "missing array 'groups'");
    }
    for (const json& g : j["groups"]) {
      s.view.groups.push_back(parse_group(g, "grouping"));
    }
    s.view.window = j.value("window", std::size_t{1});
    s.view.dominance_margin = j.value("margin", 0.0);
    s.global_r = need_numbers(j, "global_r", "grouping");
    s.group_r = need_numbers(j, "group_r", "grouping");
    cfg.grouping = std::move(s);
  }
  if (clauses.contains("perfection") &&
      section_enabled(clauses["perfection"])) {
    cfg.perfection =
        PerfectionSection{clauses["perfection"].value("gamma", 0.5)};
  }
  if (clauses.contains("drift") && section_enabled(clauses["drift"])) {
    const json& j = clauses["drift"];
    DriftSection s;
    s.window = j.value("window", std::size_t{4});
    s.eta = need_number(j, "eta", "drift");
    s.stride = j.value("stride", std::size_t{1});
    s.promote_after = j.value("promote_after", std::size_t{3});
    s.rollback_after = j.value("rollback_after", std::size_t{1});
    cfg.drift = s;
  }
  return cfg;
}

ClauseConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace aas
