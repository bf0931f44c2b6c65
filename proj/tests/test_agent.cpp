#include <doctest.h>

#include <cmath>

#include "hra/agent.hpp"
#include "hra/errors.hpp"
#include "hra/generators.hpp"

using namespace hra;

namespace {

AgentConfig fixed(int b) {
  AgentConfig c;
  c.budget_mode = BudgetMode::fixed;
  c.fixed_budget = b;
  return c;
}

EnvironmentSpec game(Tier tier, ActionKind action, int repeat, std::uint64_t seed) {
  GameRecipe r;
  r.tier = tier;
  r.action = action;
  r.repeat = repeat;
  r.seed = seed;
  return make_game_spec(r);
}

// Invariants every trace must satisfy.
void check_invariants(const EpisodeTrace& t, const AgentConfig& c, const EpisodeState& env) {
  CHECK(check_phase_grammar(t).empty());
  CHECK(t.action_count == static_cast<int>(t.steps.size()));
  CHECK(t.explore_actions() <= t.explore_budget);
  CHECK(t.action_count <= c.action_cap);
  if (c.source == HypothesisSource::oracle_bayes) {
    double prev = t.initial_entropy;
    for (const auto& s : t.steps) {
      if (s.phase == Phase::plan) CHECK(prev <= c.theta + 1e-12);
      prev = s.entropy;
    }
  }
  const std::string truth = env.game->hypothesis_ids()[env.true_hypothesis];
  for (const auto& e : t.events) {
    if (e.kind == TraceEventKind::surprise) CHECK(e.hypothesis != truth);
  }
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("budget formula") {
    CHECK(budget(12, BudgetMode::adaptive) == 5);
    CHECK(budget(100, BudgetMode::adaptive) == 30);
    CHECK(budget(30, BudgetMode::adaptive_small) == 5);
    CHECK(budget(7, BudgetMode::fixed, 0) == 0);
    for (int H = 1; H <= 300; ++H) {
      CHECK(budget(H, BudgetMode::adaptive) == std::max(5, std::min(30, static_cast<int>(std::floor(0.4 * H)))));
      CHECK(budget(H, BudgetMode::adaptive_small) == std::max(2, std::min(5, static_cast<int>(std::floor(0.2 * H)))));
    }
    CHECK_THROWS_AS(budget(0, BudgetMode::adaptive), ValidationError);
  }

  TEST_CASE("config validation") {
    AgentConfig c;
    c.verify_steps = 4;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = AgentConfig{};
    c.theta = -0.1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = fixed(-1);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK(AgentConfig{}.digest() == AgentConfig{}.digest());
    CHECK(fixed(1).digest() != fixed(2).digest());
  }

  TEST_CASE("episodic memory ring") {
    EpisodicMemory m;
    const Action a = Action::move(ActionKind::up);
    CHECK_FALSE(memory_lookup(m, 1, a));
    m.record(1, a);
    CHECK(memory_lookup(m, 1, a));
    CHECK_FALSE(memory_lookup(m, 1, Action::move(ActionKind::down)));
    for (std::uint64_t i = 0; i < 9; ++i) m.record(100 + i, a);
    CHECK(memory_lookup(m, 1, a));  // ten records: still held
    m.record(200, a);
    CHECK_FALSE(memory_lookup(m, 1, a));  // eleventh evicts the oldest
    CHECK(m.size() == EpisodicMemory::kCapacity);
    EpisodicMemory fresh;
    fresh.record(5, a);
    for (std::uint64_t i = 0; i < 11; ++i) fresh.record(1000 + i, Action::select(static_cast<int>(i), 0));
    CHECK_FALSE(memory_lookup(fresh, 5, a));
  }

  TEST_CASE("toy environment: one probe then the revealed plan") {
    const auto g = Game::compile(make_estar_spec(5, 100));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const EpisodeState env = reset(g, seed);
      const EpisodeTrace t = run_episode(env, AgentConfig{});
      CHECK(t.outcome == Outcome::solved);
      CHECK(t.action_count == 6);
      REQUIRE(t.steps.size() == 6);
      CHECK(t.steps[0].phase == Phase::explore);
      CHECK(t.steps[0].action == Action::move(ActionKind::interact));
      for (int i = 1; i < 6; ++i) CHECK(t.steps[static_cast<std::size_t>(i)].phase == Phase::plan);
      CHECK(t.explore_entropy_drop() == doctest::Approx(std::log(2.0)));
      check_invariants(t, AgentConfig{}, env);
    }
  }

  TEST_CASE("no-explore baseline refuses with zero actions") {
    std::vector<EnvironmentSpec> specs = make_census_set(0, 0);
    specs.push_back(make_estar_spec(5, 100));
    for (const auto& s : specs) {
      const EpisodeTrace t = run_episode(reset(s, 0), fixed(0));
      CHECK(t.outcome == Outcome::unsolved);
      CHECK(t.action_count == 0);
      REQUIRE_FALSE(t.events.empty());
      CHECK(t.events.front().kind == TraceEventKind::refusal);
    }
  }

  TEST_CASE("scripted bias fails blind cell-select games; the override fixes them") {
    AgentConfig biased;
    biased.source = HypothesisSource::scripted_bias;
    AgentConfig forced = biased;
    forced.action6_first_override = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto spec = game(Tier::blind_1, ActionKind::cell_select, 1, 40 + seed);
      const EpisodeTrace fail = run_episode(reset(spec, seed), biased);
      CHECK(fail.outcome == Outcome::unsolved);
      CHECK(fail.steps.front().action == Action::move(ActionKind::up));
      const EpisodeTrace win = run_episode(reset(spec, seed), forced);
      CHECK(win.outcome == Outcome::solved);
      CHECK(win.action_count == 1);
      CHECK(win.steps.front().action.is(ActionKind::cell_select));
    }
  }

  TEST_CASE("falsification re-enters exploration") {
    AgentConfig c = fixed(0);
    c.theta = 1.0;  // above ln 2: commit without exploring
    int falsified = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const EpisodeState env = reset(make_estar_spec(5, 100), seed);
      const EpisodeTrace t = run_episode(env, c);
      check_invariants(t, c, env);
      CHECK(t.outcome == Outcome::solved);
      for (const auto& e : t.events) falsified += e.kind == TraceEventKind::falsification;
    }
    CHECK(falsified > 0);
  }

  TEST_CASE("surprise aborts a plan built on a wrong hypothesis") {
    AgentConfig c = fixed(0);
    c.theta = 3.0;
    const auto spec = make_census_set(0, 0)[21];  // repeated ACTION2 x129
    const EpisodeState env = reset(spec, 0);
    const EpisodeTrace t = run_episode(env, c);
    bool surprised = false;
    for (const auto& e : t.events) surprised |= e.kind == TraceEventKind::surprise;
    CHECK(surprised);
    check_invariants(t, c, env);
  }

  TEST_CASE("phase grammar checker rejects an unexplained return to explore") {
    EpisodeTrace t;
    t.steps = {{Phase::explore, Action{}, 0, 0}, {Phase::plan, Action{}, 0, 0}, {Phase::explore, Action{}, 0, 0}};
    t.action_count = 3;
    CHECK_FALSE(check_phase_grammar(t).empty());
    t.events.push_back(TraceEvent{TraceEventKind::surprise, 2, "h"});
    CHECK(check_phase_grammar(t).empty());
  }

  TEST_CASE("invariants over toy, uis and taxonomy episodes") {
    std::vector<EnvironmentSpec> specs{make_estar_spec(5, 100), make_estar_spec(3, 40),
                                       make_uis_spec(0.3, 0.2, 0.8, 5, 100), make_uis_spec(0.5, 0.0, 0.6, 4, 60)};
    std::vector<AgentConfig> configs{AgentConfig{}, fixed(1), fixed(3)};
    AgentConfig small;
    small.budget_mode = BudgetMode::adaptive_small;
    configs.push_back(small);
    AgentConfig loose;
    loose.theta = 0.8;
    loose.verify_steps = 1;
    configs.push_back(loose);
    for (const auto& s : specs) {
      const auto g = Game::compile(s);
      for (const auto& c : configs) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          const EpisodeState env = reset(g, seed);
          check_invariants(run_episode(env, c), c, env);
        }
      }
    }
    for (const auto& s : make_census_set(2, 0)) {
      for (const auto& c : configs) {
        const EpisodeState env = reset(s, 0);
        check_invariants(run_episode(env, c), c, env);
      }
    }
  }

  TEST_CASE("episodes are deterministic") {
    for (const auto& s : make_census_set(4, 0)) {
      const EpisodeTrace a = run_episode(reset(s, 3), AgentConfig{});
      const EpisodeTrace b = run_episode(reset(s, 3), AgentConfig{});
      REQUIRE(a.steps.size() == b.steps.size());
      for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].action == b.steps[i].action);
        CHECK(a.steps[i].observation_digest == b.steps[i].observation_digest);
      }
    }
  }

  TEST_CASE("action cap truncates") {
    AgentConfig c;
    c.source = HypothesisSource::scripted_bias;
    c.action_cap = 17;
    const EpisodeTrace t = run_episode(reset(game(Tier::blind_1, ActionKind::cell_select, 1, 1), 0), c);
    CHECK(t.outcome == Outcome::unsolved);
    CHECK(t.action_count == 17);
    CHECK_FALSE(t.terminated);
  }
}
