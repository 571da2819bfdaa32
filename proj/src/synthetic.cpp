#include "aas/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace aas {
namespace {

// (rng() >> 11) spans 53 bits, so the product is an exact dyadic in [0,1):
// the same seed gives the same doubles on every conforming platform.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clamp01(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

std::vector<std::string> default_ids(std::size_t m) {
  std::vector<std::string> ids;
  ids.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    ids.push_back("ch" + std::to_string(i));
  }
  return ids;
}

std::vector<double> uniform_weights(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

SessionSnapshot blank_snapshot(std::int64_t t, const std::vector<double>& w) {
  SessionSnapshot snap;
  snap.t = t;
  snap.weights = w;
  snap.channels.assign(w.size(), ChannelState{});
  return snap;
}

SessionFile make_file(const ScenarioSpec& spec, std::size_t m) {
  SessionFile file;
  file.channel_ids = default_ids(m);
  file.weights = uniform_weights(m);
  file.epsilon = spec.epsilon;
  return file;
}

SessionFile gen_relaxation(const ScenarioSpec& spec, bool toward_goal) {
  SessionFile file = make_file(spec, spec.channels);
  double x = spec.x0;
  for (std::size_t t = 0; t < spec.steps; ++t) {
    SessionSnapshot snap =
        blank_snapshot(static_cast<std::int64_t>(t), file.weights);
    for (ChannelState& ch : snap.channels) {
      ch.x = x;
      ch.R = 0.0;
    }
    file.snapshots.push_back(std::move(snap));
    x = toward_goal ? (1.0 - spec.eta_step) * x + spec.eta_step * spec.goal
                    : spec.decay * x;
  }
  return file;
}

SessionFile gen_dizziness(const ScenarioSpec& spec) {
  SessionFile file = make_file(spec, spec.channels);
  std::mt19937_64 rng(spec.seed);
  for (std::size_t t = 0; t < spec.steps; ++t) {
    SessionSnapshot snap =
        blank_snapshot(static_cast<std::int64_t>(t), file.weights);
    for (ChannelState& ch : snap.channels) {
      ch.x = 1.0 - 0.02 * unit(rng);  // hover just below full attainment
      ch.R = 0.0;
    }
    file.snapshots.push_back(std::move(snap));
  }
  return file;
}

SessionFile gen_clones(const ScenarioSpec& spec) {
  const std::size_t m = spec.channels;
  const std::size_t k = spec.clone_count;
  if (k * 2 > m) {
    throw std::invalid_argument("clones: need channels >= 2 * clone_count");
  }
  const std::size_t bases = m - k;
  std::mt19937_64 rng(spec.seed);

  // Base channels get distinct raw weights; clone j repeats base j's weight
  // exactly so normalization keeps the pair equal.
  std::vector<double> raw(bases);
  for (double& w : raw) {
    w = 0.5 + unit(rng);
  }
  std::vector<double> weights(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    weights[i] = raw[i < bases ? i : i - bases];
    total += weights[i];
  }
  for (double& w : weights) {
    w /= total;
  }

  SessionFile file;
  file.channel_ids = default_ids(m);
  file.weights = weights;
  file.epsilon = spec.epsilon;

  std::vector<double> x(bases);
  for (double& v : x) {
    v = 0.2 + 0.6 * unit(rng);
  }
  for (std::size_t t = 0; t < spec.steps; ++t) {
    SessionSnapshot snap = blank_snapshot(static_cast<std::int64_t>(t), weights);
    for (std::size_t i = 0; i < m; ++i) {
      snap.channels[i].x = x[i < bases ? i : i - bases];
      snap.channels[i].R = 0.0;
    }
    file.snapshots.push_back(std::move(snap));
    for (double& v : x) {
      v = clamp01(v + 0.1 * (2.0 * unit(rng) - 1.0), 0.05, 0.95);
    }
  }
  return file;
}

SessionFile gen_latent(const ScenarioSpec& spec) {
  const std::size_t m = spec.channels;
  if (m < 2 || m % 2 != 0) {
    throw std::invalid_argument("latent: channel count must be even and >= 2");
  }
  std::mt19937_64 rng(spec.seed);

  // Per-channel affine readouts of one shared walk; both halves of the
  // channel list watch the same driver through different lenses.
  std::vector<double> offset(m), gain(m);
  for (std::size_t i = 0; i < m; ++i) {
    offset[i] = 0.1 + 0.3 * unit(rng);
    gain[i] = 0.3 + 0.4 * unit(rng);
  }

  SessionFile file = make_file(spec, m);
  double z = 0.5;
  for (std::size_t t = 0; t < spec.steps; ++t) {
    SessionSnapshot snap =
        blank_snapshot(static_cast<std::int64_t>(t), file.weights);
    for (std::size_t i = 0; i < m; ++i) {
      snap.channels[i].x = clamp01(offset[i] + gain[i] * z, 0.02, 0.98);
      snap.channels[i].R = 0.0;
    }
    file.snapshots.push_back(std::move(snap));
    z = clamp01(z + 0.2 * (2.0 * unit(rng) - 1.0), 0.0, 1.0);
  }
  return file;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "appetition") return Scenario::appetition;
  if (name == "degradation") return Scenario::degradation;
  if (name == "dizziness") return Scenario::dizziness;
  if (name == "clones") return Scenario::clones;
  if (name == "latent") return Scenario::latent;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::appetition: return "appetition";
    case Scenario::degradation: return "degradation";
    case Scenario::dizziness: return "dizziness";
    case Scenario::clones: return "clones";
    case Scenario::latent: return "latent";
  }
  return "unknown";
}

ScenarioSpec ScenarioSpec::defaults() const {
  ScenarioSpec out = *this;
  if (out.channels == 0) {
    switch (out.scenario) {
      case Scenario::appetition: out.channels = 2; break;
      case Scenario::degradation: out.channels = 2; break;
      case Scenario::dizziness: out.channels = 32; break;
      case Scenario::clones: out.channels = 6; break;
      case Scenario::latent: out.channels = 4; break;
    }
  }
  if (out.steps == 0) {
    switch (out.scenario) {
      // 201 snapshots leave t = 200 holding the result of 200 updates.
      case Scenario::appetition: out.steps = 201; break;
      case Scenario::degradation: out.steps = 201; break;
      case Scenario::dizziness: out.steps = 12; break;
      case Scenario::clones: out.steps = 12; break;
      case Scenario::latent: out.steps = 16; break;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> planted_clone_pairs(
    const ScenarioSpec& spec) {
  const ScenarioSpec full = spec.defaults();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (full.scenario != Scenario::clones) {
    return pairs;
  }
  const std::size_t bases = full.channels - full.clone_count;
  for (std::size_t j = 0; j < full.clone_count; ++j) {
    pairs.emplace_back(j, bases + j);
  }
  return pairs;
}

SessionFile generate_synthetic(const ScenarioSpec& spec) {
  const ScenarioSpec full = spec.defaults();
  if (full.channels == 0 || full.steps == 0) {
    throw std::invalid_argument("scenario needs channels and steps");
  }
  if (!(full.epsilon > 0.0)) {
    throw std::invalid_argument("scenario epsilon must be > 0");
  }
  if (!(full.x0 >= 0.0 && full.x0 <= 1.0) ||
      !(full.goal >= 0.0 && full.goal <= 1.0)) {
    throw std::invalid_argument("scenario start and goal must lie in [0,1]");
  }
  if (!(full.eta_step >= 0.0 && full.eta_step <= 1.0)) {
    throw std::invalid_argument("scenario eta_step must lie in [0,1]");
  }
  if (!(full.decay >= 0.0 && full.decay <= 1.0)) {
    throw std::invalid_argument("scenario decay must lie in [0,1]");
  }
  switch (full.scenario) {
    case Scenario::appetition: return gen_relaxation(full, true);
    case Scenario::degradation: return gen_relaxation(full, false);
    case Scenario::dizziness: return gen_dizziness(full);
    case Scenario::clones: return gen_clones(full);
    case Scenario::latent: return gen_latent(full);
  }
  throw std::invalid_argument("unknown scenario");
}

}  // namespace aas
