#include "hra/baselines.hpp"

#include <chrono>
#include <deque>
#include <random>

#include "hra/digest.hpp"
#include "hra/errors.hpp"

namespace hra {

namespace {

EpisodeTrace baseline_trace(const EpisodeState& env, std::string agent, const std::string& config) {
  EpisodeTrace t;
  t.env_id = env.spec().id;
  t.seed = env.seed;
  t.agent = std::move(agent);
  t.config_digest = hex_digest(fnv1a(config));
  return t;
}

void finish(EpisodeTrace& t, const EpisodeState& env) {
  t.action_count = env.action_count();
  t.terminated = env.terminal();
  if (env.crash_win) {
    t.outcome = Outcome::crash_win;
  } else {
    t.outcome = env.status() == Status::solved ? Outcome::solved : Outcome::unsolved;
  }
}

void record(EpisodeTrace& t, EpisodeState& env, const Action& a) {
  advance(env, a);
  t.steps.push_back(TraceStep{Phase::plan, a, observation_digest(observe(env)), 0.0});
}

}  // namespace

EpisodeTrace random_agent(EpisodeState env, std::uint64_t seed, int cap) {
  if (cap < 1) throw ValidationError("action cap must be positive");
  EpisodeTrace t = baseline_trace(env, "random", "random|" + std::to_string(seed) + "|" + std::to_string(cap));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kind(1, kActionKinds);
  std::uniform_int_distribution<int> xs(0, env.game->width() - 1);
  std::uniform_int_distribution<int> ys(0, env.game->height() - 1);
  while (!env.terminal() && env.action_count() < cap) {
    const int k = kind(rng);
    Action a = Action::move(static_cast<ActionKind>(k));
    if (k == static_cast<int>(ActionKind::cell_select)) {
      const int x = xs(rng);
      a = Action::select(x, ys(rng));
    }
    record(t, env, a);
  }
  finish(t, env);
  return t;
}

EpisodeTrace repeated_action_agent(EpisodeState env, const Action& action, int n_max) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  EpisodeTrace t = baseline_trace(env, "repeated", "repeated|" + to_string(action) + "|" + std::to_string(n_max));
  while (!env.terminal() && env.action_count() < n_max) record(t, env, action);
  finish(t, env);
  return t;
}

EpisodeTrace scripted_agent(EpisodeState env, const std::vector<Action>& actions, std::string name) {
  std::string config = name;
  for (const Action& a : actions) config += "|" + to_string(a);
  EpisodeTrace t = baseline_trace(env, std::move(name), config);
  for (const Action& a : actions) {
    if (env.terminal()) break;
    try {
      record(t, env, a);
    } catch (const InvalidActionError&) {
      if (!a.null_coords) throw;
      break;
    }
  }
  finish(t, env);
  return t;
}

bool replays_to_win(const EnvironmentSpec& spec, const std::vector<Action>& actions, std::uint64_t seed) {
  EpisodeState st = reset(spec, seed);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (st.terminal()) return false;
    advance(st, actions[i]);
  }
  return !actions.empty() && st.status() == Status::solved && !st.crash_win;
}

BfsResult bfs_presolve(const EnvironmentSpec& spec, int depth_limit, double time_limit_secs, std::uint64_t seed) {
  if (depth_limit < 1) throw ValidationError("depth limit must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const auto game = Game::compile(spec);
  BfsResult out;

  struct Node {
    EpisodeState state;
    std::vector<Action> path;
  };
  std::deque<Node> frontier;
  EpisodeState root = reset(game, seed);
  out.cache.emplace(state_digest(root), root.status());
  frontier.push_back(Node{std::move(root), {}});

  while (!frontier.empty()) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > time_limit_secs) {
      out.timed_out = true;
      return out;
    }
    Node node = std::move(frontier.front());
    frontier.pop_front();
    if (static_cast<int>(node.path.size()) >= depth_limit) continue;
    ++out.expanded;

    std::vector<Action> moves;
    for (int k = 1; k <= 5; ++k) moves.push_back(Action::move(static_cast<ActionKind>(k)));
    std::vector<Cell> cells = salient_cells(observe(node.state).grid);
    cells.push_back(game->center());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (const Cell& c : cells) moves.push_back(Action::select(c.x, c.y));

    for (const Action& a : moves) {
      EpisodeState next = node.state;
      advance(next, a);
      const std::uint64_t d = state_digest(next);
      if (!out.cache.emplace(d, next.status()).second) continue;
      std::vector<Action> path = node.path;
      path.push_back(a);
      if (next.status() == Status::solved && !next.crash_win) {
        out.solution = std::move(path);
        return out;
      }
      if (!next.terminal()) frontier.push_back(Node{std::move(next), std::move(path)});
    }
  }
  return out;
}

}  // namespace hra
