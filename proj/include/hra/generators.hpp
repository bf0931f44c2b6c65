#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hra/spec.hpp"

namespace hra {

EnvironmentSpec make_estar_spec(int k, int M, std::string id = {});
EnvironmentSpec make_uis_spec(double delta_h, double alpha, double beta, int k, int M, std::string id = {});

struct GameRecipe {
  Tier tier = Tier::blind_1;
  ActionKind action = ActionKind::cell_select;
  int repeat = 1;
  std::optional<Cell> target;
  std::uint64_t seed = 0;
  bool null_coord_fault = false;
  std::string id;
};

EnvironmentSpec make_game_spec(const GameRecipe& recipe);

// 25 games mirroring the public-set taxonomy: 10 blind single actions,
// 5 probe-gated, 1 short repeat (30), 1 short coordinate click, and 8
// budget-constrained (six long repeats, two late coordinate clicks). The first
// `fault_count` games carry the null-coordinate fault.
std::vector<EnvironmentSpec> make_census_set(std::uint64_t seed, int fault_count);

}  // namespace hra
