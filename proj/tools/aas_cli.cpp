// Batch evaluation CLI.
//
//   aas generate [--scenario s] [--seed n] [out]      synthetic session file
//   aas score    [--config c] [in] [--out path]       full clause pipeline
//   aas audit    [--config c] [in] [--out path]       windowlessness audit only
//   aas govern   [--config c] [in] [--out path]       drift + governance only
//   aas report   [--config c] [in] [--out path]       pipeline, table by default
//
// "-" means stdin/stdout.  Exit codes: 0 success, 1 validation error,
// 2 audit or invariant failure, 3 I/O error.

#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "aas/pipeline.hpp"
#include "aas/synthetic.hpp"

namespace {

aas::SessionFile read_sessions(const std::string& path) {
  if (path == "-") {
    return aas::load_sessions(std::cin, "<stdin>");
  }
  return aas::load_sessions_file(path);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::ios_base::failure("stdout write failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out << text;
  out.flush();
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

// Keeps only the named report sections (config echo always survives).
aas::Report filter_sections(aas::Report rep,
                            const std::set<std::string>& keep) {
  std::vector<nlohmann::json> kept;
  for (nlohmann::json& rec : rep.records) {
    const std::string section = rec.value("section", "");
    if (section == "config" || keep.count(section)) {
      kept.push_back(std::move(rec));
    }
  }
  rep.records = std::move(kept);
  return rep;
}

std::string render(const aas::Report& rep, const std::string& format) {
  return format == "table" ? aas::emit_table(rep) : aas::emit_json_lines(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"artificial age score over multi-channel memory sessions",
               "aas"};
  app.require_subcommand(1);

  std::string config_path;
  double epsilon_flag = 0.0;
  std::uint64_t seed_flag = 0;
  std::string format = "json-lines";
  app.add_option("--config", config_path, "clause configuration (JSON)");
  CLI::Option* eps_opt =
      app.add_option("--epsilon", epsilon_flag,
                     "kernel epsilon override (wins over config and header)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_flag, "seed for generation");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json-lines", "table"}))
      ->capture_default_str();

  // generate
  CLI::App* gen = app.add_subcommand("generate", "emit a synthetic session");
  gen->fallthrough();
  std::string scenario = "latent";
  std::size_t channels = 0;
  std::size_t steps = 0;
  double x0 = 0.5, goal = 1.0, eta_step = 0.1, decay = 0.9;
  std::size_t clone_count = 2;
  std::string gen_out = "-";
  gen->add_option("--scenario", scenario,
                  "appetition, degradation, dizziness, clones, latent")
      ->capture_default_str();
  gen->add_option("--channels", channels, "channel count (0 = scenario default)");
  gen->add_option("--steps", steps, "snapshot count (0 = scenario default)");
  gen->add_option("--x0", x0, "start attainment")->capture_default_str();
  gen->add_option("--goal", goal, "appetition target")->capture_default_str();
  gen->add_option("--eta", eta_step, "appetition step rate")
      ->capture_default_str();
  gen->add_option("--decay", decay, "degradation factor")
      ->capture_default_str();
  gen->add_option("--clones", clone_count, "planted duplicate channels")
      ->capture_default_str();
  gen->add_option("out", gen_out, "output path or -");

  // score / audit / govern / report share the in/out shape
  std::string in_path = "-";
  std::string out_path = "-";
  CLI::App* score = app.add_subcommand("score", "run the full clause pipeline");
  CLI::App* audit = app.add_subcommand("audit", "run the windowlessness audit");
  CLI::App* govern =
      app.add_subcommand("govern", "classify drift and decide governance");
  CLI::App* report =
      app.add_subcommand("report", "pipeline with a human-readable table");
  for (CLI::App* sub : {score, audit, govern, report}) {
    sub->fallthrough();
    sub->add_option("in", in_path, "session file or -");
    sub->add_option("--out", out_path, "output path or -");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    aas::ClauseConfig cfg;
    if (!config_path.empty()) {
      cfg = aas::load_config_file(config_path);
    }
    if (eps_opt->count() > 0) cfg.epsilon = epsilon_flag;
    if (seed_opt->count() > 0) cfg.seed = seed_flag;

    if (gen->parsed()) {
      aas::ScenarioSpec spec;
      spec.scenario = aas::parse_scenario(scenario);
      spec.seed = cfg.seed;
      spec.epsilon = cfg.epsilon.value_or(0.01);
      spec.channels = channels;
      spec.steps = steps;
      spec.x0 = x0;
      spec.goal = goal;
      spec.eta_step = eta_step;
      spec.decay = decay;
      spec.clone_count = clone_count;
      const aas::SessionFile file = aas::generate_synthetic(spec);
      if (gen_out == "-") {
        aas::save_sessions(file, std::cout);
        std::cout.flush();
        if (!std::cout) throw std::ios_base::failure("stdout write failed");
      } else {
        aas::save_sessions_file(file, gen_out);
      }
      return 0;
    }

    const aas::SessionFile file = read_sessions(in_path);

    if (audit->parsed()) {
      aas::ClauseConfig trimmed;
      trimmed.epsilon = cfg.epsilon;
      trimmed.seed = cfg.seed;
      trimmed.audit = cfg.audit ? *cfg.audit : aas::AuditSection{};
      const aas::Report rep =
          filter_sections(aas::run_pipeline(file, trimmed), {"audit"});
      write_text(out_path, render(rep, format));
      return rep.audits_passed ? 0 : 2;
    }
    if (govern->parsed()) {
      aas::ClauseConfig trimmed;
      trimmed.epsilon = cfg.epsilon;
      trimmed.seed = cfg.seed;
      trimmed.drift = cfg.drift ? *cfg.drift : aas::DriftSection{};
      const aas::Report rep = filter_sections(
          aas::run_pipeline(file, trimmed), {"drift", "governance"});
      write_text(out_path, render(rep, format));
      return 0;
    }

    // score and report: the configured pipeline, different default format.
    const aas::Report rep = aas::run_pipeline(file, cfg);
    std::string fmt = format;
    if (report->parsed() && app.get_option("--format")->count() == 0) {
      fmt = "table";
    }
    write_text(out_path, render(rep, fmt));
    return rep.audits_passed ? 0 : 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "aas: " << e.what() << '\n';
    return 3;
  } catch (const aas::ParseError& e) {
    std::cerr << "aas: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "aas: " << e.what() << '\n';
    return 1;
  }
}
