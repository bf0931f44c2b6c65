#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hra/agent.hpp"

namespace hra {

// Uniform over the seven kinds; cell-select gets uniform in-bounds coordinates.
EpisodeTrace random_agent(EpisodeState env, std::uint64_t seed, int cap = 200);

// Emits `action` until the episode ends or `n_max` actions were taken.
EpisodeTrace repeated_action_agent(EpisodeState env, const Action& action, int n_max);

// Executes `actions` in order until the episode ends. A null-coordinate probe
// rejected by a fault-free game leaves an unsolved trace with no actions.
EpisodeTrace scripted_agent(EpisodeState env, const std::vector<Action>& actions, std::string name);

struct BfsResult {
  std::optional<std::vector<Action>> solution;
  std::unordered_map<std::uint64_t, Status> cache;  // state digest -> status
  bool timed_out = false;
  std::size_t expanded = 0;
};

// Breadth-first search from the reset state. Cell-select is expanded at the
// grid center and at every salient cell of the current observation; undo is
// not expanded.
BfsResult bfs_presolve(const EnvironmentSpec& spec, int depth_limit, double time_limit_secs, std::uint64_t seed = 0);

// Replays `actions` from a fresh reset; true when the last action solves the
// level legitimately.
bool replays_to_win(const EnvironmentSpec& spec, const std::vector<Action>& actions, std::uint64_t seed = 0);

}  // namespace hra
