#pragma once

// Deterministic scenario generator for the CLI and the test harnesses.
// Every stream is a pure function of the spec (scenario, seed, knobs), so
// two runs with the same arguments emit byte-identical session files.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aas/session_io.hpp"

namespace aas {

enum class Scenario {
  appetition,   // every channel relaxes toward a shared goal
  degradation,  // geometric decay of attainment toward zero
  dizziness,    // many channels hovering near full attainment
  clones,       // random walks with planted duplicate channels
  latent,       // two views driven by a shared latent walk
};

Scenario parse_scenario(const std::string& name);  // throws std::invalid_argument
std::string scenario_name(Scenario s);

struct ScenarioSpec {
  Scenario scenario = Scenario::latent;
  std::uint64_t seed = 0;
  double epsilon = 0.01;
  // Zero means "use the scenario default" (see defaults() below).
  std::size_t channels = 0;
  std::size_t steps = 0;  // snapshot count, including t = 0

  double x0 = 0.5;        // appetition / degradation start
  double goal = 1.0;      // appetition target
  double eta_step = 0.1;  // appetition learning rate
  double decay = 0.9;     // degradation factor
  std::size_t clone_count = 2;  // clones: planted duplicate channels

  // Resolves channels/steps defaults for the chosen scenario.
  ScenarioSpec defaults() const;
};

// source index -> clone index, for tests that check dedup recall.
std::vector<std::pair<std::size_t, std::size_t>> planted_clone_pairs(
    const ScenarioSpec& spec);

SessionFile generate_synthetic(const ScenarioSpec& spec);

}  // namespace aas
