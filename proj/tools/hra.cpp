#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hra/errors.hpp"
#include "hra/harness.hpp"

namespace {

using nlohmann::json;

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return 1;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    const auto v = std::stoull(tok, &used);
    if (used != tok.size()) throw hra::ValidationError("bad seed '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw hra::ValidationError("empty seed list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-rule agent experiments"};
  app.require_subcommand(1);

  std::string config_path, seeds, out_dir, campaign_dir;
  int jobs = 0;
  struct Sub {
    const char* name;
    const char* help;
    hra::Experiment experiment;
  };
  const Sub subs[] = {
      {"run", "compare agents over a game set", hra::Experiment::compare},
      {"ablate", "explore-budget ablation", hra::Experiment::ablate_budget},
      {"multi", "repeated runs with confidence interval", hra::Experiment::multi_run},
      {"search", "exhaustive short-sequence search", hra::Experiment::search},
      {"scan", "null-coordinate vulnerability scan", hra::Experiment::scan},
      {"census", "taxonomy census with vulnerability summary", hra::Experiment::taxonomy},
      {"frontier", "speed/depth frontier sweep", hra::Experiment::frontier},
      {"project", "binomial private-set projection", hra::Experiment::project},
  };
  std::vector<std::pair<CLI::App*, hra::Experiment>> experiment_cmds;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("-c,--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("-s,--seeds", seeds, "comma-separated seed list overriding the config");
    cmd->add_option("-o,--out", out_dir, "campaign output directory overriding the config");
    cmd->add_option("-j,--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
    experiment_cmds.emplace_back(cmd, s.experiment);
  }
  CLI::App* report_cmd = app.add_subcommand("report", "recompute and check a persisted campaign");
  report_cmd->add_option("dir", campaign_dir, "campaign directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (report_cmd->parsed()) {
      std::cout << hra::report(campaign_dir).dump(2) << '\n';
      return 0;
    }
    for (const auto& [cmd, experiment] : experiment_cmds) {
      if (!cmd->parsed()) continue;
      hra::ExperimentConfig cfg = hra::load_config(config_path);
      if (cfg.source.contains("experiment") && cfg.experiment != experiment) {
        throw hra::ValidationError("config is for '" + hra::to_string(cfg.experiment) + "', not '" +
                                   hra::to_string(experiment) + "'");
      }
      cfg.experiment = experiment;
      if (!seeds.empty()) cfg.seeds = parse_seeds(seeds);
      if (!out_dir.empty()) cfg.output = out_dir;
      if (jobs > 0) cfg.jobs = jobs;
      if (cfg.output.empty()) throw hra::ValidationError("no output directory: set \"output\" or pass --out");
      const hra::RunRecord record = hra::run_experiment(cfg);
      hra::persist(cfg, record);
      std::cout << json{{"output", cfg.output.string()}, {"digest", record.digest()}, {"warnings", record.warnings}}.dump()
                << '\n';
    }
  } catch (const hra::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
