#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "hra/game.hpp"

namespace hra {

struct EpisodeState {
  std::shared_ptr<const Game> game;
  std::size_t true_hypothesis = 0;  // hidden from agents
  SimState sim;
  bool crash_win = false;
  std::uint64_t seed = 0;

  int action_count() const { return sim.steps; }
  Status status() const { return sim.core.status; }
  bool terminal() const { return sim.core.status != Status::not_finished; }
  const EnvironmentSpec& spec() const { return game->spec(); }
};

// Samples the hidden rule from the prior (taxonomy games run their planted
// rule). Identical (spec, seed) pairs give identical states.
EpisodeState reset(std::shared_ptr<const Game> game, std::uint64_t seed);
EpisodeState reset(const EnvironmentSpec& spec, std::uint64_t seed);

// In-place step. A null-coordinate fault on a faulty game ends the episode as
// a crash-win; otherwise environment errors propagate.
void advance(EpisodeState& state, const Action& action);

Observation observe(const EpisodeState& state);

struct StepOutcome {
  Observation observation;
  EpisodeState state;
};
StepOutcome step(const EpisodeState& state, const Action& action);

std::uint64_t state_digest(const EpisodeState& state);

struct EpisodeCount {
  int action_count = 0;
  bool solved = false;
  int probes = 0;
};

// Randomised toy policy: probe with probability p, otherwise commit to a
// uniformly guessed plan.
EpisodeCount simulate_estar_episode(const EnvironmentSpec& spec, std::uint64_t seed, double p);
EpisodeCount simulate_estar_episode(std::shared_ptr<const Game> game, std::uint64_t seed, double p);

// Deterministic UIS policy: issue `probes` distinct probes, then commit.
EpisodeCount simulate_uis_episode(std::shared_ptr<const Game> game, std::uint64_t seed, int probes);

// Expected action count of the probe-then-commit UIS policy.
double uis_expected_actions(const Game& game, int probes);

// Reference action count H for a level: the override when set, otherwise the
// best achievable by a policy that knows the family but not the sampled rule.
int oracle_baseline(const EnvironmentSpec& spec);
int oracle_baseline(const Game& game);

// Uniform draw in [0, 1) from a 64-bit word; platform independent.
double unit_interval(std::uint64_t word);

}  // namespace hra
