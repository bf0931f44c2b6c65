#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "hra/baselines.hpp"
#include "hra/errors.hpp"
#include "hra/generators.hpp"
#include "hra/search.hpp"

using namespace hra;

namespace {

EnvironmentSpec game(Tier tier, ActionKind action, int repeat, std::uint64_t seed, bool fault = false) {
  GameRecipe r;
  r.tier = tier;
  r.action = action;
  r.repeat = repeat;
  r.seed = seed;
  r.null_coord_fault = fault;
  return make_game_spec(r);
}

long long geometric(int depth) {
  long long total = 0, p = 1;
  for (int d = 1; d <= depth; ++d) total += (p *= 7);
  return total;
}

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("random agent") {
    const auto blind = game(Tier::blind_1, ActionKind::cell_select, 1, 3);
    const EpisodeTrace a = random_agent(reset(blind, 0), 42);
    const EpisodeTrace b = random_agent(reset(blind, 0), 42);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].action == b.steps[i].action);

    // Every action wins on a game whose hidden rule accepts any single action
    // of its kind; run it with all six winnable kinds via a fresh game each.
    int one_step = 0;
    for (int k = 1; k <= 6; ++k) {
      const auto s = game(Tier::blind_1, static_cast<ActionKind>(k), 1, 5);
      const EpisodeTrace t = random_agent(reset(s, 0), 42);
      CHECK(t.outcome == Outcome::solved);
      one_step += t.action_count == 1;
    }
    CHECK(one_step >= 1);

    const EpisodeTrace capped = random_agent(reset(game(Tier::repeated_action, ActionKind::up, 200, 0), 0), 42, 200);
    CHECK(capped.outcome == Outcome::unsolved);
    CHECK(capped.action_count == 200);
  }

  TEST_CASE("repeated-action agent") {
    const EpisodeTrace t50 =
        repeated_action_agent(reset(game(Tier::repeated_action, ActionKind::up, 50, 1), 0), Action::move(ActionKind::up), 200);
    CHECK(t50.outcome == Outcome::solved);
    CHECK(t50.action_count == 50);
    const auto r200 = game(Tier::repeated_action, ActionKind::up, 200, 1);
    CHECK(repeated_action_agent(reset(r200, 0), Action::move(ActionKind::up), 100).outcome == Outcome::unsolved);
    CHECK(repeated_action_agent(reset(r200, 0), Action::move(ActionKind::up), 200).outcome == Outcome::solved);
    const EpisodeTrace wrong =
        repeated_action_agent(reset(game(Tier::blind_1, ActionKind::cell_select, 1, 1), 0), Action::move(ActionKind::left), 30);
    CHECK(wrong.outcome == Outcome::unsolved);
    CHECK(wrong.action_count == 30);
    CHECK_THROWS_AS(repeated_action_agent(reset(r200, 0), Action::move(ActionKind::up), 0), ValidationError);
  }

  TEST_CASE("exhaustive enumeration counts") {
    const auto spec = game(Tier::repeated_action, ActionKind::up, 50, 2);
    for (int d = 1; d <= 4; ++d) {
      const SearchResult r = exhaustive_search(spec, d);
      CHECK(r.sequences_enumerated == geometric(d));
      CHECK(r.per_depth.back() == static_cast<long long>(std::pow(7, d)));
      CHECK(r.max_depth == d);
    }
    const SearchResult r3 = exhaustive_search(spec, 3);
    CHECK(r3.sequences_enumerated == 399);
    const SearchResult r4 = exhaustive_search(spec, 4);
    CHECK(r4.per_depth[3] == 2401);
    CHECK(r4.sequences_enumerated == 2800);
    CHECK(r4.winning_sequences.empty());
    CHECK_THROWS_AS(exhaustive_search(spec, 5), ValidationError);
    CHECK_THROWS_AS(exhaustive_search(spec, 0), ValidationError);
  }

  TEST_CASE("exhaustive search finds blind wins at depth 1 and winners replay") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto spec = game(Tier::blind_1, ActionKind::cell_select, 1, s);
      const SearchResult r = exhaustive_search(spec, 3);
      REQUIRE_FALSE(r.winning_sequences.empty());
      CHECK(r.winning_sequences.front().size() == 1);
      CHECK(r.winning_sequences.front().front().is(ActionKind::cell_select));
      for (const auto& w : r.winning_sequences) CHECK(replays_to_win(spec, w));
    }
    const auto rep = game(Tier::repeated_action, ActionKind::right, 3, 0);
    const SearchResult r = exhaustive_search(rep, 3);
    REQUIRE(r.winning_sequences.size() == 1);
    CHECK(r.winning_sequences.front() == std::vector<Action>(3, Action::move(ActionKind::right)));
  }

  TEST_CASE("bfs pre-solve") {
    const auto blind = game(Tier::blind_1, ActionKind::down, 1, 0);
    const BfsResult b = bfs_presolve(blind, 3, 60);
    REQUIRE(b.solution);
    CHECK(b.solution->size() == 1);

    const auto click = game(Tier::coordinate_click, ActionKind::cell_select, 2, 5);
    const BfsResult c = bfs_presolve(click, 3, 60);
    REQUIRE(c.solution);
    CHECK(c.solution->size() == 3);
    CHECK(replays_to_win(click, *c.solution));

    const BfsResult none = bfs_presolve(game(Tier::repeated_action, ActionKind::up, 50, 5), 4, 60);
    CHECK_FALSE(none.solution);
    CHECK_FALSE(none.timed_out);
    CHECK(none.cache.size() > 1);

    const BfsResult timeout = bfs_presolve(game(Tier::repeated_action, ActionKind::up, 50, 5), 4, 0.0);
    CHECK(timeout.timed_out);
    CHECK_FALSE(timeout.solution);
    CHECK_THROWS_AS(bfs_presolve(blind, 0, 1), ValidationError);
  }

  TEST_CASE("bfs minimality on planted games") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      std::vector<EnvironmentSpec> specs{game(Tier::blind_1, ActionKind::interact, 1, s),
                                         game(Tier::probe_gated, ActionKind::cell_select, 1, s),
                                         game(Tier::repeated_action, ActionKind::left, 3, s),
                                         game(Tier::coordinate_click, ActionKind::cell_select, 2, s)};
      for (const auto& spec : specs) {
        const int L = Game::compile(spec)->planted_length();
        const BfsResult r = bfs_presolve(spec, 4, 60);
        REQUIRE(r.solution);
        CHECK(static_cast<int>(r.solution->size()) == L);
        CHECK(replays_to_win(spec, *r.solution));
      }
    }
  }

  TEST_CASE("vulnerability scan") {
    const auto faulty = game(Tier::repeated_action, ActionKind::up, 100, 0, true);
    const VulnResult v = vuln_scan(faulty);
    CHECK(v.crash_win_reachable);
    REQUIRE(v.steps);
    CHECK(*v.steps == 1);
    const VulnResult again = vuln_scan(faulty);
    CHECK(again.crash_win_reachable == v.crash_win_reachable);
    CHECK(again.steps == v.steps);
    const VulnResult clean = vuln_scan(game(Tier::repeated_action, ActionKind::up, 100, 0, false));
    CHECK_FALSE(clean.crash_win_reachable);
    CHECK_FALSE(clean.steps);
  }

  TEST_CASE("classification examples") {
    const TaxonomyLabel blind = taxonomy_classify(game(Tier::blind_1, ActionKind::cell_select, 1, 0));
    CHECK(blind.tier == Tier::blind_1);
    CHECK(blind.steps == 1);
    const TaxonomyLabel rep = taxonomy_classify(game(Tier::repeated_action, ActionKind::up, 130, 0));
    CHECK(rep.tier == Tier::repeated_action);
    CHECK(rep.steps == 130);
    CHECK(census_category(rep) == Tier::budget_constrained);
    const auto pg = game(Tier::probe_gated, ActionKind::cell_select, 1, 0);
    const TaxonomyLabel probe = taxonomy_classify(pg);
    CHECK(probe.tier == Tier::probe_gated);
    CHECK(replays_to_win(pg, probe.evidence));
    const TaxonomyLabel none = taxonomy_classify(game(Tier::repeated_action, ActionKind::up, 250, 0, true));
    CHECK(none.tier == Tier::unclassified);
    CHECK(none.evidence.empty());
    CHECK(none.crash_win_reachable);
  }

  TEST_CASE("classification recovers the generated tier over 50 seeds") {
    std::mt19937_64 rng(2024);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const int blind_kind = 1 + static_cast<int>(rng() % 6);
      const int rep_kind = 1 + static_cast<int>(rng() % 5);
      const int rep_n = 2 + static_cast<int>(rng() % 150);
      const int click_n = 2 + static_cast<int>(rng() % 80);
      const std::vector<std::pair<Tier, EnvironmentSpec>> cases{
          {Tier::blind_1, game(Tier::blind_1, static_cast<ActionKind>(blind_kind), 1, s)},
          {Tier::probe_gated, game(Tier::probe_gated, ActionKind::cell_select, 1, s)},
          {Tier::repeated_action, game(Tier::repeated_action, static_cast<ActionKind>(rep_kind), rep_n, s)},
          {Tier::coordinate_click, game(Tier::coordinate_click, ActionKind::cell_select, click_n, s)}};
      for (const auto& [tier, spec] : cases) {
        const TaxonomyLabel l = taxonomy_classify(spec);
        INFO(spec.id);
        CHECK(l.tier == tier);
        CHECK(replays_to_win(spec, l.evidence));
        CHECK(l.steps == Game::compile(spec)->planted_length());
      }
    }
  }

  TEST_CASE("census classification and vulnerability counts") {
    int crash = 0;
    std::map<Tier, int> counts;
    for (const auto& s : make_census_set(0, 18)) {
      const TaxonomyLabel l = taxonomy_classify(s);
      ++counts[census_category(l)];
      crash += l.crash_win_reachable;
    }
    CHECK(counts[Tier::blind_1] == 10);
    CHECK(counts[Tier::probe_gated] == 5);
    CHECK(counts[Tier::repeated_action] == 1);
    CHECK(counts[Tier::coordinate_click] == 1);
    CHECK(counts[Tier::budget_constrained] == 8);
    CHECK(crash == 18);
  }
}
