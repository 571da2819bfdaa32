#include "aas/session_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

namespace aas {
namespace {

using nlohmann::json;

json parse_line(const std::string& text, const std::string& source,
                int line_no) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError(source, line_no, "not a JSON object");
  }
  return j;
}

std::vector<double> number_array(const json& j, const char* key,
                                 const std::string& source, int line_no) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(source, line_no,
                     std::string("missing or non-array field '") + key + "'");
  }
  std::vector<double> out;
  for (const json& v : j[key]) {
    if (!v.is_number()) {
      throw ParseError(source, line_no,
                       std::string("non-numeric entry in '") + key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

SessionFile load_sessions(std::istream& in, const std::string& source) {
  SessionFile file;
  std::string text;
  int line_no = 0;
  bool have_header = false;
  std::int64_t last_t = -1;

  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) {
      continue;
    }
    const json j = parse_line(text, source, line_no);

    if (!have_header) {
      if (j.value("type", "") != "header") {
        throw ParseError(source, line_no, "first record must be the header");
      }
      if (!j.contains("ids") || !j["ids"].is_array()) {
        throw ParseError(source, line_no, "header lacks channel ids");
      }
      std::set<std::string> seen;
      for (const json& id : j["ids"]) {
        if (!id.is_string()) {
          throw ParseError(source, line_no, "channel id is not a string");
        }
        if (!seen.insert(id.get<std::string>()).second) {
          throw ParseError(source, line_no,
                           "duplicate channel id " + id.get<std::string>());
        }
        file.channel_ids.push_back(id.get<std::string>());
      }
      file.weights = number_array(j, "weights", source, line_no);
      if (j.contains("channels") &&
          (!j["channels"].is_number_unsigned() ||
           j["channels"].get<std::size_t>() != file.channel_ids.size())) {
        throw ParseError(source, line_no,
                         "header channel count disagrees with ids");
      }
      if (file.weights.size() != file.channel_ids.size()) {
        throw ParseError(source, line_no,
                         "header weights disagree with ids");
      }
      file.epsilon = j.value("epsilon", 0.01);
      if (!(file.epsilon > 0.0)) {
        throw ParseError(source, line_no, "header epsilon must be > 0");
      }
      have_header = true;
      continue;
    }

    SessionSnapshot snap;
    if (!j.contains("t") || !j["t"].is_number_integer()) {
      throw ParseError(source, line_no, "record lacks integer t");
    }
    snap.t = j["t"].get<std::int64_t>();
    if (snap.t <= last_t) {
      throw ParseError(source, line_no, "t must be strictly increasing");
    }
    last_t = snap.t;
    const std::vector<double> x = number_array(j, "x", source, line_no);
    const std::vector<double> r = number_array(j, "r", source, line_no);
    if (x.size() != file.arity() || r.size() != file.arity()) {
      throw ParseError(source, line_no, "record arity disagrees with header");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      snap.channels.push_back(ChannelState{x[i], r[i]});
    }
    snap.weights = file.weights;
    if (j.contains("meta")) {
      if (!j["meta"].is_array() || j["meta"].size() != file.arity()) {
        throw ParseError(source, line_no, "meta arity disagrees with header");
      }
      for (const json& m : j["meta"]) {
        if (!m.is_string()) {
          throw ParseError(source, line_no, "meta entry is not a string");
        }
        snap.metadata.push_back(m.get<std::string>());
      }
    }
    try {
      snap.validate();
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
    file.snapshots.push_back(std::move(snap));
  }
  if (!have_header) {
    throw ParseError(source, line_no == 0 ? 1 : line_no, "no header record");
  }
  return file;
}

SessionFile load_sessions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open " + path);
  }
  return load_sessions(in, path);
}

void save_sessions(const SessionFile& file, std::ostream& out) {
  json header;
  header["type"] = "header";
  header["version"] = 1;
  header["channels"] = file.channel_ids.size();
  header["ids"] = file.channel_ids;
  header["weights"] = file.weights;
  header["epsilon"] = file.epsilon;
  out << header.dump() << "\n";
  for (const SessionSnapshot& snap : file.snapshots) {
    json rec;
    rec["t"] = snap.t;
    std::vector<double> x, r;
    for (const ChannelState& ch : snap.channels) {
      x.push_back(ch.x);
      r.push_back(ch.R);
    }
    rec["x"] = x;
    rec["r"] = r;
    if (!snap.metadata.empty()) {
      rec["meta"] = snap.metadata;
    }
    out << rec.dump() << "\n";
  }
}

void save_sessions_file(const SessionFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::ios_base::failure("cannot open " + path + " for writing");
  }
  save_sessions(file, out);
  out.flush();
  if (!out) {
    throw std::ios_base::failure("failed writing " + path);
  }
}

}  // namespace aas
