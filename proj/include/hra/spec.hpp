#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hra/action.hpp"

namespace hra {

enum class Family : std::uint8_t { toy_estar, uis, taxonomy_game };

// Strategy tiers. The first four are planted by the game generator;
// `budget_constrained` is a census grouping and `unclassified` a search outcome.
enum class Tier : std::uint8_t {
  blind_1,
  probe_gated,
  repeated_action,
  coordinate_click,
  budget_constrained,
  unclassified,
};

std::string to_string(Family f);
std::string to_string(Tier t);
Family parse_family(const std::string& s);
Tier parse_tier(const std::string& s);

struct HypothesisEntry {
  std::string id;
  double weight = 0.0;
};

// Two-hypothesis toy environment: probe costs 1, the right plan k, a wrong plan M.
struct EstarParams {
  int k = 5;
  int M = 100;
};

// Uniform-information-structure environment.
struct UisParams {
  double delta_h = 0.0;  // nats gained per probe
  double alpha = 0.0;    // correctness intercept
  double beta = 0.0;     // correctness slope per nat
  int k = 5;
  int M = 100;
};

// Synthetic game with one planted winning rule.
struct GameParams {
  Tier tier = Tier::blind_1;
  ActionKind action = ActionKind::cell_select;
  std::optional<Cell> target;  // generated from `seed` when absent
  int repeat = 1;              // N for repeated / coordinate-click tiers
  std::uint64_t seed = 0;      // decoration and target placement
};

using FamilyParams = std::variant<EstarParams, UisParams, GameParams>;

struct EnvironmentSpec {
  std::string id;
  Family family = Family::toy_estar;
  // Empty means "generate the family's default hypothesis space".
  std::vector<HypothesisEntry> hypotheses;
  FamilyParams params = EstarParams{};
  int width = 64;
  int height = 64;
  bool null_coord_fault = false;
  std::optional<int> human_baseline;
};

nlohmann::json to_json(const EnvironmentSpec& spec);
EnvironmentSpec spec_from_json(const nlohmann::json& j);
EnvironmentSpec load_spec(const std::filesystem::path& path);
void save_spec(const EnvironmentSpec& spec, const std::filesystem::path& path);

}  // namespace hra
