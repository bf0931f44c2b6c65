#include "hra/generators.hpp"

#include <cstdio>

#include "hra/errors.hpp"

namespace hra {

EnvironmentSpec make_estar_spec(int k, int M, std::string id) {
  EnvironmentSpec s;
  s.id = id.empty() ? "estar-k" + std::to_string(k) + "-M" + std::to_string(M) : std::move(id);
  s.family = Family::toy_estar;
  s.params = EstarParams{k, M};
  return s;
}

EnvironmentSpec make_uis_spec(double delta_h, double alpha, double beta, int k, int M, std::string id) {
  EnvironmentSpec s;
  s.id = id.empty() ? "uis" : std::move(id);
  s.family = Family::uis;
  s.params = UisParams{delta_h, alpha, beta, k, M};
  return s;
}

EnvironmentSpec make_game_spec(const GameRecipe& r) {
  EnvironmentSpec s;
  s.family = Family::taxonomy_game;
  GameParams g;
  g.tier = r.tier;
  g.action = r.action;
  g.repeat = r.repeat;
  g.target = r.target;
  g.seed = r.seed;
  if (r.tier == Tier::probe_gated || r.tier == Tier::coordinate_click) g.action = ActionKind::cell_select;
  s.params = g;
  s.null_coord_fault = r.null_coord_fault;
  if (r.id.empty()) {
    s.id = to_string(r.tier) + "-A" + std::to_string(static_cast<int>(g.action));
    if (r.tier == Tier::repeated_action || r.tier == Tier::coordinate_click) s.id += "-n" + std::to_string(r.repeat);
    s.id += "-s" + std::to_string(r.seed);
  } else {
    s.id = r.id;
  }
  return s;
}

std::vector<EnvironmentSpec> make_census_set(std::uint64_t seed, int fault_count) {
  if (fault_count < 0 || fault_count > 25) throw ValidationError("fault count must lie in 0..25");
  std::vector<GameRecipe> recipes;
  for (int i = 0; i < 5; ++i) recipes.push_back({Tier::blind_1, ActionKind::cell_select, 1, {}, 0, false, {}});
  for (int a = 1; a <= 5; ++a) recipes.push_back({Tier::blind_1, static_cast<ActionKind>(a), 1, {}, 0, false, {}});
  for (int i = 0; i < 5; ++i) recipes.push_back({Tier::probe_gated, ActionKind::cell_select, 1, {}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 30, {}, 0, false, {}});
  recipes.push_back({Tier::coordinate_click, ActionKind::cell_select, 3, {}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 50, {}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 100, {}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 128, {}, 0, false, {}});
  recipes.push_back({Tier::coordinate_click, ActionKind::cell_select, 100, Cell{12, 44}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::down, 129, {}, 0, false, {}});
  recipes.push_back({Tier::coordinate_click, ActionKind::cell_select, 52, Cell{24, 48}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 130, {}, 0, false, {}});
  recipes.push_back({Tier::repeated_action, ActionKind::up, 200, {}, 0, false, {}});

  std::vector<EnvironmentSpec> out;
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    auto& r = recipes[i];
    r.seed = seed * 1000 + i;
    r.null_coord_fault = static_cast<int>(i) < fault_count;
    char id[32];
    std::snprintf(id, sizeof id, "g%02zu-", i);
    EnvironmentSpec s = make_game_spec(r);
    s.id = id + s.id;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hra
