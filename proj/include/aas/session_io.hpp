#pragma once

// Session files are JSON lines: a header object naming the channels,
// their fixed weights, and the kernel epsilon, followed by one record per
// step.  Loading validates everything and reports the offending line;
// saving emits bytes that reload to identical snapshots.
//
//   {"type":"header","version":1,"channels":2,"ids":["a","b"],
//    "weights":[0.5,0.5],"epsilon":0.01}
//   {"t":0,"x":[0.5,0.5],"r":[0.0,0.0],"meta":["",""]}

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aas/kernel.hpp"

namespace aas {

struct SessionFile {
  std::vector<std::string> channel_ids;
  std::vector<double> weights;
  double epsilon = 0.01;
  std::vector<SessionSnapshot> snapshots;

  std::size_t arity() const { return channel_ids.size(); }
};

struct ParseError : std::runtime_error {
  int line;

  ParseError(const std::string& source, int line_no, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line_no) + ": " +
                           what),
        line(line_no) {}
};

// Throws ParseError on any malformed or out-of-contract line.  The source
// name only labels error messages.
SessionFile load_sessions(std::istream& in,
                          const std::string& source = "<stream>");
SessionFile load_sessions_file(const std::string& path);  // may throw
                                                          // std::ios_base::failure

void save_sessions(const SessionFile& file, std::ostream& out);
void save_sessions_file(const SessionFile& file, const std::string& path);

}  // namespace aas
