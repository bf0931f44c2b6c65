#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "hra/errors.hpp"
#include "hra/generators.hpp"
#include "hra/harness.hpp"

using namespace hra;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hra_test_" + name);
  fs::remove_all(p);
  return p;
}

json compare_config() {
  return json::parse(R"({
    "experiment": "compare",
    "games": [{"census": {"seed": 0, "faults": 0}}],
    "agents": [
      {"name": "random", "type": "random"},
      {"name": "B1", "type": "aera", "budget": "fixed", "b": 0},
      {"name": "aera-adaptive", "type": "aera", "budget": "adaptive"}
    ],
    "seeds": [42]
  })");
}

const AgentAggregate& find(const RunRecord& r, const std::string& name) {
  for (const auto& a : r.aggregates) {
    if (a.agent == name) return a;
  }
  throw Error("missing aggregate " + name);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing and validation") {
    const ExperimentConfig c = config_from_json(compare_config());
    CHECK(c.games.size() == 25);
    CHECK(c.agents.size() == 3);
    CHECK(c.agents[1].aera.fixed_budget == 0);
    CHECK_NOTHROW(c.validate());

    json j = compare_config();
    j["experiment"] = "bogus";
    CHECK_THROWS_AS(config_from_json(j), ValidationError);

    j = compare_config();
    j["agents"] = json::array({{{"type", "random"}}});
    CHECK_THROWS_AS(config_from_json(j).validate(), ValidationError);

    j = compare_config();
    j["seeds"] = json::array();
    CHECK_THROWS_AS(config_from_json(j).validate(), ValidationError);

    j = compare_config();
    j["agents"].push_back({{"name", "random"}, {"type", "random"}});
    CHECK_THROWS_AS(config_from_json(j).validate(), ValidationError);

    j = compare_config();
    j["agents"].push_back({{"type", "aera"}, {"budget", "sometimes"}});
    CHECK_THROWS_AS(config_from_json(j), ValidationError);

    j = compare_config();
    j["games"] = json::array({{{"nothing", 1}}});
    CHECK_THROWS_AS(config_from_json(j), ValidationError);

    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
  }

  TEST_CASE("digest ignores output location and parallelism") {
    json a = compare_config();
    json b = compare_config();
    a["output"] = "/tmp/x";
    b["output"] = "/tmp/y";
    b["jobs"] = 4;
    CHECK(config_from_json(a).digest() == config_from_json(b).digest());
    b["seeds"] = {43};
    CHECK(config_from_json(a).digest() != config_from_json(b).digest());
  }

  TEST_CASE("compare is deterministic across runs and job counts") {
    ExperimentConfig c = config_from_json(compare_config());
    const RunRecord r1 = run_compare(c);
    c.jobs = 4;
    const RunRecord r2 = run_compare(c);
    CHECK(r1.digest() == r2.digest());
    CHECK(r1.cells.size() == 75);
    CHECK(find(r1, "B1").rhae == 0.0);
    CHECK(find(r1, "B1").solved == 0);
    CHECK(*find(r1, "aera-adaptive").rhae > *find(r1, "random").rhae);
    for (const auto& cell : r1.cells) CHECK(cell.error.empty());
  }

  TEST_CASE("a failing cell is isolated") {
    GameRecipe ok_recipe;
    ok_recipe.tier = Tier::blind_1;
    ok_recipe.action = ActionKind::down;
    ok_recipe.id = "ok";
    GameRecipe bad_recipe;
    bad_recipe.tier = Tier::coordinate_click;
    bad_recipe.repeat = 1;
    bad_recipe.id = "broken";
    const AgentDescriptor agent = agent_from_json({{"name", "aera"}, {"type", "aera"}});
    std::vector<CellResult> cells;
    CHECK_NOTHROW(cells.push_back(run_cell(make_game_spec(ok_recipe), agent, 0, 200)));
    CHECK_NOTHROW(cells.push_back(run_cell(make_game_spec(bad_recipe), agent, 0, 200)));
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].error.empty());
    CHECK(cells[1].error.find("at least 2") != std::string::npos);
    CHECK_FALSE(cells[1].trace.has_value());
    const AgentAggregate a = aggregate("aera", cells);
    CHECK(a.failures == 1);
    CHECK(a.levels == 1);
    REQUIRE(a.rhae.has_value());
    CHECK(*a.rhae == cells[0].level.score());

    // The same game in a config is rejected before any cell runs.
    json j = compare_config();
    j["games"] = json::parse(R"([{"game": {"tier": "coordinate-click", "repeat": 1, "id": "broken"}}])");
    CHECK_THROWS_AS(run_compare(config_from_json(j)), ValidationError);
  }

  TEST_CASE("persist and report round trip") {
    json j = compare_config();
    j["output"] = scratch("roundtrip").string();
    const ExperimentConfig c = config_from_json(j);
    const RunRecord r = run_compare(c);
    persist(c, r);
    for (const char* f : {"config.json", "run_record.json", "metadata.json", "levels.csv", "aggregates.csv"}) {
      CHECK(fs::exists(c.output / f));
    }
    const json rep = report(c.output);
    CHECK(rep.at("digest") == r.digest());
    CHECK(rep.at("traces_replayed") == 75);
    for (const auto& row : rep.at("recomputed")) {
      CHECK(row.at("rhae").get<double>() == doctest::Approx(*find(r, row.at("agent")).rhae).epsilon(1e-12));
    }

    // A tampered trace must fail replay.
    const fs::path tf = c.output / r.cells[2].trace_file;
    std::ifstream is(tf);
    std::string first, rest, line;
    std::getline(is, first);
    while (std::getline(is, line)) rest += line + "\n";
    is.close();
    std::ofstream(tf) << rest;
    CHECK_THROWS(report(c.output));
    fs::remove_all(c.output);
  }

  TEST_CASE("ablation with a zero budget scores nothing") {
    const json j = json::parse(R"({
      "experiment": "ablate-budget",
      "games": [{"estar": {"k": 5, "M": 100, "id": "estar"}},
                {"game": {"tier": "probe-gated", "seed": 11, "id": "pg"}}],
      "agents": [{"type": "aera"}],
      "budgets": [0, 1, 3],
      "seeds": [0, 1]
    })");
    const RunRecord r = run_ablate_budget(config_from_json(j));
    CHECK(find(r, "aera-fixed-0").rhae == 0.0);
    CHECK(*find(r, "aera-fixed-1").rhae > 0.0);
    CHECK(*find(r, "aera-fixed-3").rhae >= *find(r, "aera-fixed-1").rhae);
    json bad = j;
    bad["budgets"] = {-1};
    CHECK_THROWS_AS(run_ablate_budget(config_from_json(bad)), ValidationError);
    bad["budgets"] = json::array();
    CHECK_THROWS_AS(run_ablate_budget(config_from_json(bad)), ValidationError);
  }

  TEST_CASE("multi-run checks") {
    json j = json::parse(R"({
      "experiment": "multi-run",
      "games": [{"census": {"seed": 0, "faults": 0}}],
      "agents": [{"name": "aera", "type": "aera", "budget": "fixed", "b": 1}],
      "runs": 1,
      "seeds": [100]
    })");
    CHECK_THROWS_AS(run_multi(config_from_json(j)), ValidationError);
    j["runs"] = 3;
    const RunRecord r = run_multi(config_from_json(j));
    CHECK(r.aggregates.size() == 3);
    CHECK(r.results.at("statistics").at("std") == 0.0);
    bool warned = false;
    for (const auto& w : r.warnings) warned |= w.find("zero variance") != std::string::npos;
    CHECK(warned);
    CHECK(r.results.at("solve_frequency").size() == 25);

    j["seeds"] = {5, 5, 6};
    const RunRecord dup = run_multi(config_from_json(j));
    bool dup_warned = false;
    for (const auto& w : dup.warnings) dup_warned |= w.find("repeats seeds") != std::string::npos;
    CHECK(dup_warned);
    j["seeds"] = {5, 6};
    CHECK_THROWS_AS(run_multi(config_from_json(j)), ValidationError);
  }

  TEST_CASE("census") {
    const json empty = json::parse(R"({"experiment": "taxonomy", "games": []})");
    const RunRecord e = run_census(config_from_json(empty));
    CHECK(e.results.at("games") == 0);
    CHECK(e.results.at("crash_win_reachable") == 0);
    CHECK(e.results.at("category_counts").at("blind-1") == 0);

    const json full = json::parse(R"({"experiment": "taxonomy", "games": [{"census": {"seed": 0, "faults": 18}}]})");
    const RunRecord r = run_census(config_from_json(full));
    CHECK(r.results.at("crash_win_reachable") == 18);
    const auto& probe = find(r, "null-probe");
    CHECK(probe.crash_wins == 18);
    REQUIRE(probe.rhae.has_value());
    CHECK(*probe.rhae == 0.0);
    const auto& counts = r.results.at("category_counts");
    CHECK(counts.at("blind-1") == 10);
    CHECK(counts.at("probe-gated") == 5);
    CHECK(counts.at("repeated-action") == 1);
    CHECK(counts.at("coordinate-click") == 1);
    CHECK(counts.at("budget-constrained") == 8);
  }

  TEST_CASE("frontier places the no-exploration baseline at zero depth") {
    const json j = json::parse(R"({
      "experiment": "frontier",
      "games": [{"estar": {"k": 5, "M": 100, "id": "estar"}}],
      "policies": [{"p": 0.0}, {"p": 1.0},
                   {"label": "B1", "agent": {"type": "aera", "budget": "fixed", "b": 0}}],
      "episodes": 2000,
      "seeds": [3]
    })");
    const RunRecord r = run_frontier(config_from_json(j));
    const auto& rows = r.results.at("frontier");
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      if (row.at("policy") == "B1") CHECK(row.at("depth") == 0.0);
      if (row.contains("within_3se")) CHECK(row.at("within_3se") == true);
      if (row.at("policy") == "p=1") CHECK(row.at("on_frontier") == true);
    }
    json bad = j;
    bad["policies"] = json::array();
    CHECK_THROWS_AS(run_frontier(config_from_json(bad)), ValidationError);
  }

  TEST_CASE("projection") {
    const json j = json::parse(R"({"experiment": "project", "projection": {"n_public": 25, "solves": 4, "n_private": 55}})");
    const RunRecord r = run_project(config_from_json(j));
    CHECK(r.results.at("projection").at("expected_rhae").get<double>() == doctest::Approx(0.2116));
  }
}
