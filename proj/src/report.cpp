#include "aas/report.hpp"

#include <cstdio>
#include <sstream>

namespace aas {
namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Right-pads to the width of the widest cell per column.
std::string render_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      if (c + 1 < row.size()) {
        out << std::string(width[c] - row[c].size(), ' ');
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string clause_cell(const json& clauses, const char* name,
                        const char* field) {
  if (!clauses.contains(name)) return "-";
  const json& sec = clauses[name];
  if (!sec.contains(field) || !sec[field].is_number()) return "-";
  return fixed6(sec[field].get<double>());
}

}  // namespace

const json* Report::find_section(const std::string& name) const {
  for (const json& rec : records) {
    if (rec.value("section", "") == name) return &rec;
  }
  return nullptr;
}

std::string emit_json_lines(const Report& report) {
  std::string out;
  for (const json& rec : report.records) {
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string emit_table(const Report& report) {
  std::ostringstream out;

  if (const json* cfg = report.find_section("config")) {
    out << "config epsilon=" << cfg->at("epsilon").dump()
        << " seed=" << cfg->at("seed").dump() << '\n';
  }

  // Which optional per-session columns appear at all.
  bool any_clauses = false;
  bool has_pc = false, has_psr = false, has_harm = false, has_align = false;
  bool has_dizzy = false, has_perf = false;
  for (const json& rec : report.records) {
    if (rec.value("section", "") != "session" || !rec.contains("clauses")) {
      continue;
    }
    any_clauses = true;
    const json& c = rec["clauses"];
    has_pc |= c.contains("contradiction");
    has_psr |= c.contains("sufficient_reason");
    has_harm |= c.contains("harmony");
    has_align |= c.contains("alignment");
    has_dizzy |= c.contains("dizziness");
    has_perf |= c.contains("perfection");
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"t",     "total", "peak", "entropy",
                                   "kappa", "apper", "active"};
  if (has_pc) head.push_back("pc");
  if (has_psr) head.push_back("psr");
  if (has_harm) head.push_back("harmony");
  if (has_align) head.push_back("align");
  if (has_perf) head.push_back("perfection");
  if (has_dizzy) head.push_back("dizzy");
  rows.push_back(head);

  for (const json& rec : report.records) {
    if (rec.value("section", "") != "session") continue;
    std::vector<std::string> row;
    row.push_back(rec.at("t").dump());
    row.push_back(fixed6(rec.at("total").get<double>()));
    row.push_back(fixed6(rec.at("peak_share").get<double>()));
    row.push_back(fixed6(rec.at("contrib_entropy").get<double>()));
    row.push_back(fixed6(rec.at("kappa").get<double>()));
    row.push_back(fixed6(rec.at("apper_level").get<double>()));
    row.push_back(rec.at("active_count").dump());
    const json clauses =
        any_clauses ? rec.value("clauses", json::object()) : json::object();
    if (has_pc) row.push_back(clause_cell(clauses, "contradiction", "penalty"));
    if (has_psr) {
      row.push_back(clause_cell(clauses, "sufficient_reason", "penalty"));
    }
    if (has_harm) row.push_back(clause_cell(clauses, "harmony", "harm"));
    if (has_align) row.push_back(clause_cell(clauses, "alignment", "harm"));
    if (has_perf) {
      row.push_back(clause_cell(clauses, "perfection", "perfection"));
    }
    if (has_dizzy) {
      std::string flag = "-";
      if (clauses.contains("dizziness")) {
        const json& d = clauses["dizziness"];
        const bool tau = d.value("tau_dizzy", false);
        const bool del = d.value("delta_dizzy", false);
        flag = tau && del ? "td" : tau ? "t" : del ? "d" : ".";
      }
      row.push_back(flag);
    }
    rows.push_back(std::move(row));
  }
  out << render_columns(rows);

  for (const json& rec : report.records) {
    const std::string section = rec.value("section", "");
    if (section == "audit") {
      out << "audit: " << (rec.at("passed").get<bool>() ? "passed" : "FAILED")
          << " (" << rec.at("findings").size() << " probes)\n";
    } else if (section == "dedup") {
      out << "dedup: " << rec.at("groups").size() << " group(s), max total drift "
          << rec.at("merged_total_drift").dump() << '\n';
    } else if (section == "rate_check") {
      out << "rate_check: " << (rec.at("clean").get<bool>() ? "clean" : "VIOLATIONS")
          << " (" << rec.at("violations").size() << " violation(s), "
          << rec.at("flatlines").size() << " flatline(s)), cap "
          << fixed6(rec.at("cap").get<double>()) << " per unit step\n";
    } else if (section == "law_fixity") {
      out << "law_fixity: " << fixed6(rec.at("value").get<double>()) << '\n';
    } else if (section == "hierarchy") {
      out << "hierarchy: depth " << rec.at("depth").dump() << ", organic "
          << (rec.at("organic").get<bool>() ? "yes" : "no") << ", deepest total "
          << fixed6(rec.at("levels").back().at("total").get<double>()) << '\n';
    } else if (section == "dominance") {
      out << "dominance: stable dominant ";
      if (rec.at("stable_dominant").is_null()) {
        out << "none";
      } else {
        out << "group " << rec.at("stable_dominant").dump();
      }
      out << '\n';
    } else if (section == "whole_part") {
      out << "whole_part: global mean " << fixed6(rec.at("global_mean").get<double>())
          << " >= parts mean " << fixed6(rec.at("parts_mean").get<double>())
          << ", bounds " << fixed6(rec.at("bound_peak_share").get<double>())
          << " / " << fixed6(rec.at("bound_min_score").get<double>()) << '\n';
    } else if (section == "drift") {
      std::size_t imp = 0, reg = 0, neu = 0;
      for (const json& w : rec.at("windows")) {
        const std::string cls = w.at("class").get<std::string>();
        if (cls == "improvement") ++imp;
        else if (cls == "regression") ++reg;
        else ++neu;
      }
      out << "drift: " << rec.at("windows").size() << " window(s): " << imp
          << " improvement, " << reg << " regression, " << neu << " neutral\n";
    } else if (section == "governance") {
      out << "governance: " << rec.at("verdict").get<std::string>() << '\n';
    }
  }
  return out.str();
}

}  // namespace aas
