#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hra/agent.hpp"
#include "hra/scoring.hpp"
#include "hra/search.hpp"

namespace hra {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Experiment : std::uint8_t { compare, ablate_budget, multi_run, search, scan, taxonomy, frontier, project };
std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

enum class AgentKind : std::uint8_t { aera, random, repeated, bfs, null_probe };

struct AgentDescriptor {
  std::string name;
  AgentKind kind = AgentKind::aera;
  AgentConfig aera;            // aera
  Action action;               // repeated
  int n_max = 200;             // repeated
  int depth_limit = 4;         // bfs
  double time_limit = 180.0;   // bfs, seconds
};

// A frontier policy: either an exploration probability on toy-estar games or
// an agent descriptor run on every game.
struct PolicySpec {
  std::string label;
  std::optional<double> p;
  std::optional<AgentDescriptor> agent;
};

struct ProjectionParams {
  int n_public = 25;
  int solves = 0;
  int n_private = 55;
  double per_solve_score = kScoreCap;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::compare;
  std::vector<EnvironmentSpec> games;
  std::vector<AgentDescriptor> agents;
  std::vector<std::uint64_t> seeds;
  int cap = 200;
  std::vector<int> budgets;
  int runs = 0;
  std::vector<PolicySpec> policies;
  int episodes = 10000;
  int max_depth = 3;
  int classify_budget = 200;
  ProjectionParams projection;
  std::filesystem::path output;
  int jobs = 1;
  bool write_traces = true;
  nlohmann::json source;  // the parsed config, snapshotted into the campaign

  // Experiment-specific checks; throws ValidationError.
  void validate() const;
  std::string digest() const;
};

// `base` resolves relative spec-file paths.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);
AgentDescriptor agent_from_json(const nlohmann::json& j);

struct CellResult {
  std::string game;
  std::string agent;
  std::uint64_t seed = 0;
  LevelResult level;
  std::optional<EpisodeTrace> trace;
  std::string trace_file;  // relative to the campaign directory
  std::string error;       // non-empty when the cell failed
};

// One game × agent × seed episode with failure isolation.
CellResult run_cell(const EnvironmentSpec& game, const AgentDescriptor& agent, std::uint64_t seed, int cap);

struct AgentAggregate {
  std::string agent;
  std::optional<double> rhae;  // absent when undefined (all crash-wins)
  int solved = 0;
  int crash_wins = 0;
  int levels = 0;
  int failures = 0;
  std::vector<std::string> solved_games;
};

AgentAggregate aggregate(const std::string& agent, const std::vector<CellResult>& cells);

struct RunRecord {
  std::string config_digest;
  Experiment experiment = Experiment::compare;
  std::vector<CellResult> cells;
  std::vector<AgentAggregate> aggregates;
  nlohmann::json results;  // experiment-specific report payload
  std::vector<std::string> warnings;
  double wall_time = 0.0;  // seconds; persisted in metadata only
  std::string tool_version = kToolVersion;

  nlohmann::json to_json() const;  // deterministic, excludes wall time
  std::string digest() const;
};

RunRecord run_compare(const ExperimentConfig& cfg);
RunRecord run_ablate_budget(const ExperimentConfig& cfg);
RunRecord run_multi(const ExperimentConfig& cfg);
RunRecord run_frontier(const ExperimentConfig& cfg);
RunRecord run_census(const ExperimentConfig& cfg);
RunRecord run_search(const ExperimentConfig& cfg);
RunRecord run_scan(const ExperimentConfig& cfg);
RunRecord run_project(const ExperimentConfig& cfg);
RunRecord run_experiment(const ExperimentConfig& cfg);

// Writes config.json, run_record.json, metadata.json, traces/ and the CSV
// reports into cfg.output.
void persist(const ExperimentConfig& cfg, const RunRecord& record);

// Recomputes every aggregate of a persisted campaign from its level results
// and rewrites summary.json. Throws when a recorded aggregate disagrees or a
// referenced trace does not replay.
nlohmann::json report(const std::filesystem::path& campaign_dir);

}  // namespace hra
