#include "hra/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hra/errors.hpp"

namespace hra {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int ceil_count(double expected) { return static_cast<int>(std::ceil(expected - 1e-9)); }

}  // namespace

double unit_interval(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

EpisodeState reset(std::shared_ptr<const Game> game, std::uint64_t seed) {
  EpisodeState st;
  st.seed = seed;
  if (const auto pinned = game->pinned_hypothesis()) {
    st.true_hypothesis = *pinned;
  } else {
    const double u = unit_interval(splitmix64(seed));
    const Eigen::VectorXd& prior = game->prior();
    double acc = 0.0;
    std::size_t pick = 0;
    // Inverse CDF over positive-weight hypotheses only.
    for (Eigen::Index i = 0; i < prior.size(); ++i) {
      if (prior(i) <= 0.0) continue;
      pick = static_cast<std::size_t>(i);
      acc += prior(i);
      if (u < acc) break;
    }
    st.true_hypothesis = pick;
  }
  st.sim = game->initial_state();
  st.game = std::move(game);
  return st;
}

EpisodeState reset(const EnvironmentSpec& spec, std::uint64_t seed) { return reset(Game::compile(spec), seed); }

void advance(EpisodeState& state, const Action& action) {
  const StepEffect effect = state.game->apply(state.true_hypothesis, state.sim, action);
  if (effect.fault) {
    // The engine faulted; the wrapper reports it as a win.
    ++state.sim.steps;
    state.sim.core.status = Status::solved;
    state.crash_win = true;
  }
}

Observation observe(const EpisodeState& state) { return state.game->observe(state.true_hypothesis, state.sim); }

StepOutcome step(const EpisodeState& state, const Action& action) {
  EpisodeState next = state;
  advance(next, action);
  Observation o = observe(next);
  return StepOutcome{std::move(o), std::move(next)};
}

std::uint64_t state_digest(const EpisodeState& state) { return state.game->state_digest(state.sim); }

EpisodeCount simulate_estar_episode(std::shared_ptr<const Game> game, std::uint64_t seed, double p) {
  if (game->family() != Family::toy_estar) throw ValidationError("simulate_estar_episode needs a toy-estar spec");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("exploration probability must lie in [0, 1]");
  EpisodeState st = reset(std::move(game), seed);
  const std::uint64_t draw = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  int guess = 0;
  int probes = 0;
  if (unit_interval(draw) < p) {
    probes = 1;
    advance(st, Action::move(ActionKind::interact));
    guess = observe(st).revealed.value_or(0);
  } else {
    guess = unit_interval(splitmix64(draw)) < 0.5 ? 0 : 1;
  }
  const Action plan_action = Action::move(guess == 0 ? ActionKind::up : ActionKind::down);
  while (!st.terminal()) advance(st, plan_action);
  return EpisodeCount{st.action_count(), st.status() == Status::solved, probes};
}

EpisodeCount simulate_estar_episode(const EnvironmentSpec& spec, std::uint64_t seed, double p) {
  return simulate_estar_episode(Game::compile(spec), seed, p);
}

EpisodeCount simulate_uis_episode(std::shared_ptr<const Game> game, std::uint64_t seed, int probes) {
  if (game->family() != Family::uis) throw ValidationError("simulate_uis_episode needs a uis spec");
  if (probes < 0 || probes > game->uis_probe_count()) throw ValidationError("probe count outside 0..n");
  EpisodeState st = reset(std::move(game), seed);
  for (int j = 0; j < probes; ++j) advance(st, Action::select(j, 0));
  while (!st.terminal()) advance(st, Action::move(ActionKind::up));
  return EpisodeCount{st.action_count(), st.status() == Status::solved, probes};
}

double uis_expected_actions(const Game& game, int probes) {
  const auto& p = std::get<UisParams>(game.spec().params);
  double correct = 0.0;
  for (int t = 0; t <= probes; ++t) correct += game.uis_threshold_probability(t);
  correct = std::min(correct, 1.0);
  return probes + correct * p.k + (1.0 - correct) * p.M;
}

int oracle_baseline(const Game& game) {
  const auto& spec = game.spec();
  if (spec.human_baseline) return *spec.human_baseline;
  switch (spec.family) {
    case Family::toy_estar: {
      // Deterministic policies: commit blind, or probe once then plan.
      const auto& p = std::get<EstarParams>(spec.params);
      const double blind = 0.5 * (p.k + p.M);
      const double probe = 1.0 + p.k;
      return ceil_count(std::min(blind, probe));
    }
    case Family::uis: {
      double best = std::numeric_limits<double>::infinity();
      for (int d = 0; d <= game.uis_probe_count(); ++d) best = std::min(best, uis_expected_actions(game, d));
      return ceil_count(best);
    }
    case Family::taxonomy_game: return game.planted_length();
  }
  return 1;
}

int oracle_baseline(const EnvironmentSpec& spec) { return oracle_baseline(*Game::compile(spec)); }

}  // namespace hra
