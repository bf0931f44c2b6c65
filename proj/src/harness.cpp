#include "hra/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "hra/baselines.hpp"
#include "hra/digest.hpp"
#include "hra/errors.hpp"
#include "hra/generators.hpp"
#include "hra/trace_io.hpp"

namespace hra {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::compare: return "compare";
    case Experiment::ablate_budget: return "ablate-budget";
    case Experiment::multi_run: return "multi-run";
    case Experiment::search: return "search";
    case Experiment::scan: return "scan";
    case Experiment::taxonomy: return "taxonomy";
    case Experiment::frontier: return "frontier";
    case Experiment::project: return "project";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Experiment::project); ++i) {
    if (to_string(static_cast<Experiment>(i)) == s) return static_cast<Experiment>(i);
  }
  throw ValidationError("unknown experiment '" + s + "'");
}

namespace {

std::string kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::aera: return "aera";
    case AgentKind::random: return "random";
    case AgentKind::repeated: return "repeated";
    case AgentKind::bfs: return "bfs";
    case AgentKind::null_probe: return "null-probe";
  }
  return "?";
}

json agent_json(const AgentDescriptor& a) {
  json j{{"name", a.name}, {"type", kind_name(a.kind)}};
  switch (a.kind) {
    case AgentKind::aera:
      j["budget"] = to_string(a.aera.budget_mode);
      j["b"] = a.aera.fixed_budget;
      j["theta"] = a.aera.theta;
      j["verify_steps"] = a.aera.verify_steps;
      j["source"] = to_string(a.aera.source);
      j["action6_first_override"] = a.aera.action6_first_override;
      j["strong_evidence"] = a.aera.strong_evidence;
      j["seed"] = a.aera.seed;
      break;
    case AgentKind::repeated:
      j["action"] = to_string(a.action);
      j["n_max"] = a.n_max;
      break;
    case AgentKind::bfs:
      j["depth_limit"] = a.depth_limit;
      j["time_limit"] = a.time_limit;
      break;
    default: break;
  }
  return j;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::string join_actions(const std::vector<Action>& seq) {
  std::string s;
  for (const auto& a : seq) s += (s.empty() ? "" : " ") + to_string(a);
  return s;
}

void add_games(const json& entry, const fs::path& base, std::vector<EnvironmentSpec>& out) {
  if (entry.contains("file")) {
    fs::path p = entry.at("file").get<std::string>();
    if (p.is_relative()) p = base / p;
    out.push_back(load_spec(p));
  } else if (entry.contains("spec")) {
    out.push_back(spec_from_json(entry.at("spec")));
  } else if (entry.contains("census")) {
    const auto& c = entry.at("census");
    for (auto& s : make_census_set(c.value("seed", 0ULL), c.value("faults", 0))) out.push_back(std::move(s));
  } else if (entry.contains("estar")) {
    const auto& e = entry.at("estar");
    EnvironmentSpec s = make_estar_spec(e.value("k", 5), e.value("M", 100), e.value("id", std::string{}));
    if (e.contains("human_baseline")) s.human_baseline = e.at("human_baseline").get<int>();
    out.push_back(std::move(s));
  } else if (entry.contains("uis")) {
    const auto& u = entry.at("uis");
    out.push_back(make_uis_spec(u.at("delta_h"), u.at("alpha"), u.at("beta"), u.value("k", 5), u.value("M", 100),
                                u.value("id", std::string{})));
  } else if (entry.contains("game")) {
    const auto& g = entry.at("game");
    GameRecipe r;
    r.tier = parse_tier(g.at("tier"));
    if (g.contains("action")) r.action = parse_action(g.at("action")).action_kind();
    r.repeat = g.value("repeat", 1);
    if (g.contains("target")) r.target = Cell{g.at("target").at(0), g.at("target").at(1)};
    r.null_coord_fault = g.value("fault", false);
    const auto seed = g.value("seed", 0ULL);
    const int count = g.value("count", 1);
    for (int i = 0; i < count; ++i) {
      r.seed = seed + static_cast<std::uint64_t>(i);
      r.id = count == 1 ? g.value("id", std::string{}) : std::string{};
      out.push_back(make_game_spec(r));
    }
  } else {
    throw ValidationError("game entry needs one of file, spec, census, estar, uis, game");
  }
}

}  // namespace

AgentDescriptor agent_from_json(const json& j) {
  AgentDescriptor a;
  const std::string type = j.value("type", std::string("aera"));
  if (type == "aera") {
    a.kind = AgentKind::aera;
    a.aera.budget_mode = parse_budget_mode(j.value("budget", std::string("adaptive")));
    a.aera.fixed_budget = j.value("b", 0);
    a.aera.theta = j.value("theta", 0.1);
    a.aera.verify_steps = j.value("verify_steps", 3);
    a.aera.source = parse_source(j.value("source", std::string("oracle-bayes")));
    a.aera.action6_first_override = j.value("action6_first_override", false);
    a.aera.strong_evidence = j.value("strong_evidence", 0.9);
    a.aera.seed = j.value("seed", 0ULL);
    a.aera.validate();
  } else if (type == "random") {
    a.kind = AgentKind::random;
  } else if (type == "repeated") {
    a.kind = AgentKind::repeated;
    a.action = parse_action(j.value("action", std::string("A1")));
    a.n_max = j.value("n_max", 200);
    if (a.n_max < 1) throw ValidationError("repeated agent needs n_max >= 1");
  } else if (type == "bfs") {
    a.kind = AgentKind::bfs;
    a.depth_limit = j.value("depth_limit", 4);
    a.time_limit = j.value("time_limit", 180.0);
    if (a.depth_limit < 1) throw ValidationError("bfs agent needs depth_limit >= 1");
  } else if (type == "null-probe") {
    a.kind = AgentKind::null_probe;
  } else {
    throw ValidationError("unknown agent type '" + type + "'");
  }
  std::string name = type;
  if (a.kind == AgentKind::aera) {
    name = a.aera.budget_mode == BudgetMode::fixed ? "aera-fixed-" + std::to_string(a.aera.fixed_budget)
                                                   : "aera-" + to_string(a.aera.budget_mode);
  }
  a.name = j.value("name", name);
  return a;
}

ExperimentConfig config_from_json(const json& j, const fs::path& base) {
  ExperimentConfig c;
  try {
    c.source = j;
    c.experiment = parse_experiment(j.value("experiment", std::string("compare")));
    if (j.contains("games")) {
      const json& g = j.at("games");
      if (g.is_array()) {
        for (const auto& e : g) add_games(e, base, c.games);
      } else {
        add_games(g, base, c.games);
      }
    }
    for (const auto& a : j.value("agents", json::array())) c.agents.push_back(agent_from_json(a));
    for (const auto& s : j.value("seeds", json::array())) c.seeds.push_back(s.get<std::uint64_t>());
    c.cap = j.value("cap", 200);
    for (const auto& b : j.value("budgets", json::array())) c.budgets.push_back(b.get<int>());
    c.runs = j.value("runs", 0);
    for (const auto& p : j.value("policies", json::array())) {
      PolicySpec ps;
      if (p.contains("p")) ps.p = p.at("p").get<double>();
      if (p.contains("agent")) ps.agent = agent_from_json(p.at("agent"));
      if (ps.p.has_value() == ps.agent.has_value()) throw ValidationError("a policy needs exactly one of p, agent");
      ps.label = p.value("label", ps.p ? "p=" + fmt(*ps.p) : ps.agent->name);
      c.policies.push_back(std::move(ps));
    }
    c.episodes = j.value("episodes", 10000);
    c.max_depth = j.value("max_depth", 3);
    c.classify_budget = j.value("classify_budget", 200);
    if (j.contains("projection")) {
      const auto& p = j.at("projection");
      c.projection.n_public = p.value("n_public", 25);
      c.projection.solves = p.value("solves", 0);
      c.projection.n_private = p.value("n_private", 55);
      c.projection.per_solve_score = p.value("per_solve_score", kScoreCap);
    }
    if (j.contains("output")) {
      c.output = j.at("output").get<std::string>();
      if (c.output.is_relative() && !base.empty()) c.output = base / c.output;
    }
    c.jobs = j.value("jobs", 1);
    c.write_traces = j.value("write_traces", true);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void ExperimentConfig::validate() const {
  const bool needs_seeds = experiment == Experiment::compare || experiment == Experiment::ablate_budget ||
                           experiment == Experiment::multi_run || experiment == Experiment::frontier;
  const bool needs_games = experiment != Experiment::project && experiment != Experiment::taxonomy;
  if (needs_games && games.empty()) throw ValidationError("game set is empty");
  if (needs_seeds && seeds.empty()) throw ValidationError("seed list is empty");
  if (cap < 1) throw ValidationError("cap must be positive");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  std::set<std::string> ids;
  for (const auto& g : games) {
    if (!ids.insert(g.id).second) throw ValidationError("duplicate game id '" + g.id + "'");
    Game::compile(g);
  }
  std::set<std::string> names;
  for (const auto& a : agents) {
    if (!names.insert(a.name).second) throw ValidationError("duplicate agent name '" + a.name + "'");
  }
  const auto aera_count = std::count_if(agents.begin(), agents.end(), [](const auto& a) { return a.kind == AgentKind::aera; });
  switch (experiment) {
    case Experiment::compare:
      if (aera_count == 0 || aera_count == static_cast<long>(agents.size())) {
        throw ValidationError("compare needs at least one aera agent and one baseline");
      }
      break;
    case Experiment::ablate_budget:
      if (budgets.empty()) throw ValidationError("ablate-budget needs a non-empty budget list");
      if (std::any_of(budgets.begin(), budgets.end(), [](int b) { return b < 0; })) {
        throw ValidationError("budgets must be >= 0");
      }
      if (aera_count == 0) throw ValidationError("ablate-budget needs an aera agent");
      break;
    case Experiment::multi_run:
      if (runs < 2) throw ValidationError("multi-run needs runs >= 2");
      if (aera_count == 0) throw ValidationError("multi-run needs an aera agent");
      if (seeds.size() != 1 && static_cast<int>(seeds.size()) != runs) {
        throw ValidationError("multi-run needs one base seed or one seed per run");
      }
      break;
    case Experiment::frontier:
      if (policies.empty()) throw ValidationError("frontier needs a non-empty policy grid");
      if (episodes < 1) throw ValidationError("episodes must be >= 1");
      break;
    case Experiment::search:
      if (max_depth < 1 || max_depth > 4) throw ValidationError("max_depth must lie in 1..4");
      break;
    case Experiment::taxonomy:
      if (classify_budget < 1) throw ValidationError("classify_budget must be positive");
      break;
    case Experiment::project: {
      const auto& p = projection;
      binomial_projection(p.n_public, p.solves, p.n_private, p.per_solve_score);
      break;
    }
    case Experiment::scan: break;
  }
}

namespace {

json canonical_json(const ExperimentConfig& c) {
  json games = json::array();
  for (const auto& g : c.games) games.push_back(to_json(g));
  json agents = json::array();
  for (const auto& a : c.agents) agents.push_back(agent_json(a));
  json policies = json::array();
  for (const auto& p : c.policies) {
    json pj{{"label", p.label}};
    if (p.p) pj["p"] = *p.p;
    if (p.agent) pj["agent"] = agent_json(*p.agent);
    policies.push_back(pj);
  }
  return {{"experiment", to_string(c.experiment)},
          {"games", games},
          {"agents", agents},
          {"seeds", c.seeds},
          {"cap", c.cap},
          {"budgets", c.budgets},
          {"runs", c.runs},
          {"policies", policies},
          {"episodes", c.episodes},
          {"max_depth", c.max_depth},
          {"classify_budget", c.classify_budget},
          {"projection",
           {{"n_public", c.projection.n_public},
            {"solves", c.projection.solves},
            {"n_private", c.projection.n_private},
            {"per_solve_score", c.projection.per_solve_score}}}};
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string trace_path(const std::string& agent, const std::string& game, std::uint64_t seed) {
  return "traces/" + agent + "/" + game + "__s" + std::to_string(seed) + ".jsonl";
}

struct Task {
  const EnvironmentSpec* game;
  AgentDescriptor agent;
  std::uint64_t seed;
};

std::vector<CellResult> run_tasks(const std::vector<Task>& tasks, int cap, int jobs) {
  std::vector<CellResult> out(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    out[i] = run_cell(*tasks[i].game, tasks[i].agent, tasks[i].seed, cap);
  });
  return out;
}

json aggregate_json(const AgentAggregate& a) {
  return {{"agent", a.agent},
          {"rhae", a.rhae ? json(*a.rhae) : json(nullptr)},
          {"solved", a.solved},
          {"levels", a.levels},
          {"crash_wins", a.crash_wins},
          {"failures", a.failures},
          {"solved_games", a.solved_games}};
}

template <typename F>
RunRecord timed(const ExperimentConfig& cfg, F body) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  r.experiment = cfg.experiment;
  r.config_digest = cfg.digest();
  body(r);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<std::string> agent_names(const std::vector<CellResult>& cells) {
  std::vector<std::string> names;
  for (const auto& c : cells) {
    if (std::find(names.begin(), names.end(), c.agent) == names.end()) names.push_back(c.agent);
  }
  return names;
}

const AgentDescriptor& first_aera(const ExperimentConfig& cfg) {
  for (const auto& a : cfg.agents) {
    if (a.kind == AgentKind::aera) return a;
  }
  throw ValidationError("no aera agent configured");
}

}  // namespace

std::string ExperimentConfig::digest() const { return hex_digest(fnv1a(canonical_json(*this).dump())); }

CellResult run_cell(const EnvironmentSpec& game, const AgentDescriptor& agent, std::uint64_t seed, int cap) {
  CellResult r;
  r.game = game.id;
  r.agent = agent.name;
  r.seed = seed;
  r.level.game = game.id;
  try {
    const auto g = Game::compile(game);
    r.level.H = oracle_baseline(*g);
    EpisodeState env = reset(g, seed);
    EpisodeTrace t;
    switch (agent.kind) {
      case AgentKind::aera: {
        AgentConfig c = agent.aera;
        c.action_cap = cap;
        t = run_episode(std::move(env), c);
        break;
      }
      case AgentKind::random: t = random_agent(std::move(env), seed, cap); break;
      case AgentKind::repeated: t = repeated_action_agent(std::move(env), agent.action, std::min(agent.n_max, cap)); break;
      case AgentKind::bfs: {
        const BfsResult b = bfs_presolve(game, agent.depth_limit, agent.time_limit, seed);
        t = scripted_agent(std::move(env), b.solution.value_or(std::vector<Action>{}), "bfs");
        break;
      }
      case AgentKind::null_probe: t = scripted_agent(std::move(env), {Action::null_select()}, "null-probe"); break;
    }
    t.agent = agent.name;
    r.level = level_result(t, r.level.H);
    r.trace_file = trace_path(agent.name, game.id, seed);
    r.trace = std::move(t);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.level.solved = false;
    r.level.A.reset();
    r.trace.reset();
  }
  return r;
}

AgentAggregate aggregate(const std::string& agent, const std::vector<CellResult>& cells) {
  AgentAggregate a;
  a.agent = agent;
  std::vector<LevelResult> levels;
  std::set<std::string> solved;
  for (const auto& c : cells) {
    if (c.agent != agent) continue;
    if (!c.error.empty()) {
      ++a.failures;
      continue;
    }
    levels.push_back(c.level);
    ++a.levels;
    if (c.level.crash_win) ++a.crash_wins;
    if (c.level.solved && !c.level.crash_win) {
      ++a.solved;
      solved.insert(c.game);
    }
  }
  a.solved_games.assign(solved.begin(), solved.end());
  try {
    a.rhae = rhae_aggregate(levels);
  } catch (const UndefinedMetricError&) {
    a.rhae.reset();
  }
  return a;
}

json RunRecord::to_json() const {
  json levels = json::array();
  for (const auto& c : cells) {
    json l{{"game", c.game},
           {"agent", c.agent},
           {"seed", c.seed},
           {"H", c.level.H},
           {"A", c.level.A ? json(*c.level.A) : json(nullptr)},
           {"solved", c.level.solved},
           {"crash_win", c.level.crash_win},
           {"score", c.error.empty() && !c.level.crash_win ? json(c.level.score()) : json(nullptr)},
           {"trace", c.trace_file}};
    if (!c.error.empty()) l["error"] = c.error;
    levels.push_back(std::move(l));
  }
  json aggs = json::array();
  for (const auto& a : aggregates) aggs.push_back(aggregate_json(a));
  return {{"tool_version", tool_version}, {"experiment", hra::to_string(experiment)},
          {"config_digest", config_digest}, {"levels", levels},
          {"aggregates", aggs},             {"results", results},
          {"warnings", warnings}};
}

std::string RunRecord::digest() const { return hex_digest(fnv1a(to_json().dump())); }

RunRecord run_compare(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    std::vector<Task> tasks;
    for (const auto& g : cfg.games) {
      for (const auto& a : cfg.agents) {
        for (auto s : cfg.seeds) tasks.push_back(Task{&g, a, s});
      }
    }
    r.cells = run_tasks(tasks, cfg.cap, cfg.jobs);
    json table = json::array();
    for (const auto& a : cfg.agents) {
      r.aggregates.push_back(aggregate(a.name, r.cells));
      table.push_back(aggregate_json(r.aggregates.back()));
    }
    r.results = {{"comparison", table}};
  });
}

RunRecord run_ablate_budget(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    const AgentDescriptor& base = first_aera(cfg);
    std::vector<Task> tasks;
    std::vector<std::string> names;
    for (int b : cfg.budgets) {
      AgentDescriptor a = base;
      a.aera.budget_mode = BudgetMode::fixed;
      a.aera.fixed_budget = b;
      a.name = "aera-fixed-" + std::to_string(b);
      names.push_back(a.name);
      for (const auto& g : cfg.games) {
        for (auto s : cfg.seeds) tasks.push_back(Task{&g, a, s});
      }
    }
    r.cells = run_tasks(tasks, cfg.cap, cfg.jobs);
    json rows = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      r.aggregates.push_back(aggregate(names[i], r.cells));
      json row = aggregate_json(r.aggregates.back());
      row["budget"] = cfg.budgets[i];
      rows.push_back(std::move(row));
    }
    json ties = json::array();
    for (std::size_t i = 0; i < r.aggregates.size(); ++i) {
      for (std::size_t j = i + 1; j < r.aggregates.size(); ++j) {
        const auto& a = r.aggregates[i];
        const auto& b = r.aggregates[j];
        if (a.rhae && b.rhae && std::abs(*a.rhae - *b.rhae) < 1e-12 && a.solved_games != b.solved_games) {
          ties.push_back({{"budgets", {cfg.budgets[i], cfg.budgets[j]}},
                          {"rhae", *a.rhae},
                          {"solved_games", {a.solved_games, b.solved_games}}});
        }
      }
    }
    r.results = {{"ablation", rows}, {"equal_score_different_sets", ties}};
  });
}

RunRecord run_multi(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    const AgentDescriptor& base = first_aera(cfg);
    std::vector<std::uint64_t> run_seeds;
    for (int i = 0; i < cfg.runs; ++i) {
      run_seeds.push_back(cfg.seeds.size() == 1 ? cfg.seeds[0] + static_cast<std::uint64_t>(i)
                                                : cfg.seeds[static_cast<std::size_t>(i)]);
    }
    std::vector<Task> tasks;
    std::vector<std::string> names;
    for (int i = 0; i < cfg.runs; ++i) {
      AgentDescriptor a = base;
      a.name = base.name + "#run" + std::to_string(i);
      a.aera.seed = run_seeds[static_cast<std::size_t>(i)];
      names.push_back(a.name);
      for (const auto& g : cfg.games) tasks.push_back(Task{&g, a, run_seeds[static_cast<std::size_t>(i)]});
    }
    r.cells = run_tasks(tasks, cfg.cap, cfg.jobs);
    std::vector<double> scores;
    json runs = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      r.aggregates.push_back(aggregate(names[i], r.cells));
      const auto& a = r.aggregates.back();
      if (a.rhae) scores.push_back(*a.rhae);
      json row = aggregate_json(a);
      row["seed"] = run_seeds[i];
      runs.push_back(std::move(row));
    }
    std::map<std::string, int> freq;
    for (const auto& g : cfg.games) freq[g.id] = 0;
    for (const auto& a : r.aggregates) {
      for (const auto& g : a.solved_games) ++freq[g];
    }
    json frequency = json::array();
    for (const auto& g : cfg.games) {
      frequency.push_back({{"game", g.id}, {"solved_runs", freq[g.id]}, {"runs", cfg.runs}});
    }
    json stats = nullptr;
    if (scores.size() >= 2) {
      const RunStatistics s = multi_run_ci(scores);
      stats = {{"mean", s.mean}, {"std", s.std}, {"ci95", {s.ci95.first, s.ci95.second}}, {"t_critical", s.t_critical}};
      if (s.std == 0.0) r.warnings.push_back("zero variance across runs; check the seed configuration");
    } else {
      r.warnings.push_back("fewer than two runs have a defined RHAE; no interval reported");
    }
    if (std::set<std::uint64_t>(run_seeds.begin(), run_seeds.end()).size() != run_seeds.size()) {
      r.warnings.push_back("seed list repeats seeds; runs are not independent");
    }
    r.results = {{"runs", runs}, {"statistics", stats}, {"solve_frequency", frequency}};
  });
}

RunRecord run_frontier(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    json rows = json::array();
    for (const auto& g : cfg.games) {
      const auto game = Game::compile(g);
      const bool estar = g.family == Family::toy_estar;
      const DepthMode mode = estar ? DepthMode::per_episode : DepthMode::per_action;
      std::vector<FrontierPoint> points;
      std::vector<json> extra;
      for (const auto& pol : cfg.policies) {
        json x = json::object();
        if (pol.p) {
          if (!estar) continue;
          std::vector<EpisodeSummary> eps(static_cast<std::size_t>(cfg.episodes));
          const std::uint64_t base = cfg.seeds.front() * static_cast<std::uint64_t>(cfg.episodes);
          parallel_for(eps.size(), cfg.jobs, [&](std::size_t i) {
            const EpisodeCount e = simulate_estar_episode(game, base + i, *pol.p);
            eps[i] = EpisodeSummary{e.action_count, true, e.probes, e.probes * std::numbers::ln2};
          });
          points.push_back(speed_depth(eps, cfg.cap, mode, pol.label));
          const auto curve = estar_curve(std::get<EstarParams>(g.params).k, std::get<EstarParams>(g.params).M);
          double mean = 0.0, sq = 0.0;
          for (const auto& e : eps) mean += e.actions;
          mean /= static_cast<double>(eps.size());
          for (const auto& e : eps) sq += (e.actions - mean) * (e.actions - mean);
          const double se = eps.size() > 1 ? std::sqrt(sq / static_cast<double>(eps.size() - 1)) /
                                                 std::sqrt(static_cast<double>(eps.size()))
                                           : 0.0;
          const double analytic = curve.A_of_p(*pol.p);
          x = {{"mean_actions", mean},
               {"se_actions", se},
               {"analytic_actions", analytic},
               {"analytic_speed", 1.0 / analytic},
               {"analytic_depth", *pol.p * std::numbers::ln2},
               {"within_3se", std::abs(mean - analytic) <= 3.0 * se + 1e-9}};
        } else {
          std::vector<EpisodeTrace> traces;
          for (auto s : cfg.seeds) {
            CellResult c = run_cell(g, *pol.agent, s, cfg.cap);
            if (!c.error.empty()) throw Error("frontier policy '" + pol.label + "' failed: " + c.error);
            traces.push_back(std::move(*c.trace));
          }
          points.push_back(speed_depth(traces, cfg.cap, mode, pol.label));
        }
        extra.push_back(std::move(x));
      }
      const auto front = pareto_frontier(points);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const bool on = std::any_of(front.begin(), front.end(), [&](const auto& f) { return f.policy == p.policy; });
        json row{{"game", g.id},       {"policy", p.policy}, {"speed", p.speed},
                 {"depth", p.depth},   {"on_frontier", on},  {"depth_mode", p.per_episode ? "per-episode" : "per-action"}};
        row.update(extra[i]);
        rows.push_back(std::move(row));
      }
    }
    r.results = {{"frontier", rows}};
  });
}

RunRecord run_census(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    std::vector<TaxonomyLabel> labels(cfg.games.size());
    parallel_for(cfg.games.size(), cfg.jobs, [&](std::size_t i) {
      labels[i] = taxonomy_classify(cfg.games[i], cfg.classify_budget);
    });
    // Every game also gets the null-coordinate probe and any configured agents;
    // their crash-wins must stay out of the RHAE figures.
    AgentDescriptor probe;
    probe.name = "null-probe";
    probe.kind = AgentKind::null_probe;
    std::vector<Task> tasks;
    for (const auto& g : cfg.games) {
      tasks.push_back(Task{&g, probe, 0});
      for (const auto& a : cfg.agents) {
        for (auto s : cfg.seeds) tasks.push_back(Task{&g, a, s});
      }
    }
    r.cells = run_tasks(tasks, cfg.cap, cfg.jobs);
    for (const auto& name : agent_names(r.cells)) r.aggregates.push_back(aggregate(name, r.cells));

    json rows = json::array();
    std::map<std::string, int> counts;
    for (const char* t : {"blind-1", "probe-gated", "repeated-action", "coordinate-click", "budget-constrained",
                          "unclassified"}) {
      counts[t] = 0;
    }
    int crash = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& l = labels[i];
      const std::string cat = to_string(census_category(l));
      ++counts[cat];
      crash += l.crash_win_reachable ? 1 : 0;
      rows.push_back({{"game", cfg.games[i].id},
                      {"tier", to_string(l.tier)},
                      {"category", cat},
                      {"steps", l.steps},
                      {"evidence", join_actions(l.evidence)},
                      {"crash_win_reachable", l.crash_win_reachable}});
    }
    r.results = {{"census", rows}, {"category_counts", counts}, {"crash_win_reachable", crash},
                 {"games", cfg.games.size()}};
  });
}

RunRecord run_search(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    std::vector<SearchResult> res(cfg.games.size());
    parallel_for(cfg.games.size(), cfg.jobs, [&](std::size_t i) { res[i] = exhaustive_search(cfg.games[i], cfg.max_depth); });
    json rows = json::array();
    for (const auto& s : res) {
      json winners = json::array();
      for (const auto& w : s.winning_sequences) winners.push_back(join_actions(w));
      rows.push_back({{"game", s.game_id},
                      {"max_depth", s.max_depth},
                      {"sequences_enumerated", s.sequences_enumerated},
                      {"per_depth", s.per_depth},
                      {"winning_sequences", winners}});
    }
    r.results = {{"search", rows}};
  });
}

RunRecord run_scan(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    json rows = json::array();
    int reachable = 0;
    for (const auto& g : cfg.games) {
      const VulnResult v = vuln_scan(g);
      reachable += v.crash_win_reachable ? 1 : 0;
      rows.push_back({{"game", g.id},
                      {"crash_win_reachable", v.crash_win_reachable},
                      {"steps", v.steps ? json(*v.steps) : json(nullptr)}});
    }
    r.results = {{"scan", rows}, {"crash_win_reachable", reachable}};
  });
}

RunRecord run_project(const ExperimentConfig& cfg) {
  return timed(cfg, [&](RunRecord& r) {
    const auto& p = cfg.projection;
    const Projection pr = binomial_projection(p.n_public, p.solves, p.n_private, p.per_solve_score);
    r.results = {{"projection",
                  {{"n_public", p.n_public},
                   {"solves", p.solves},
                   {"n_private", p.n_private},
                   {"per_solve_score", p.per_solve_score},
                   {"expected_rhae", pr.expected},
                   {"ci95", {pr.ci95.first, pr.ci95.second}}}}};
  });
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::compare: return run_compare(cfg);
    case Experiment::ablate_budget: return run_ablate_budget(cfg);
    case Experiment::multi_run: return run_multi(cfg);
    case Experiment::search: return run_search(cfg);
    case Experiment::scan: return run_scan(cfg);
    case Experiment::taxonomy: return run_census(cfg);
    case Experiment::frontier: return run_frontier(cfg);
    case Experiment::project: return run_project(cfg);
  }
  throw ValidationError("unknown experiment");
}

namespace {

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> level_row(const CellResult& c) {
  return {c.game,
          std::to_string(c.level.H),
          c.level.A ? std::to_string(*c.level.A) : "",
          c.level.solved ? "true" : "false",
          c.error.empty() && !c.level.crash_win ? fmt(c.level.score()) : "",
          c.agent,
          std::to_string(c.seed),
          c.level.crash_win ? "true" : "false",
          c.error};
}

std::string opt(const json& v) { return v.is_null() ? "" : v.is_number_float() ? fmt(v.get<double>()) : v.dump(); }

void write_reports(const fs::path& dir, const RunRecord& r) {
  if (!r.cells.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : r.cells) rows.push_back(level_row(c));
    write_csv(dir / "levels.csv", {"game", "H", "A", "solved", "score", "agent", "seed", "crash_win", "error"}, rows);
    std::vector<std::vector<std::string>> agg;
    for (const auto& a : r.aggregates) {
      agg.push_back({a.agent, a.rhae ? fmt(*a.rhae) : "undefined", std::to_string(a.solved), std::to_string(a.levels),
                     std::to_string(a.crash_wins), std::to_string(a.failures)});
    }
    write_csv(dir / "aggregates.csv", {"agent", "rhae", "solved", "levels", "crash_wins", "failures"}, agg);
  }
  const json& res = r.results;
  if (res.contains("ablation")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : res["ablation"]) {
      std::string set;
      for (const auto& g : a["solved_games"]) set += (set.empty() ? "" : ";") + g.get<std::string>();
      rows.push_back({std::to_string(a["budget"].get<int>()), opt(a["rhae"]), std::to_string(a["solved"].get<int>()), set});
    }
    write_csv(dir / "ablation.csv", {"budget", "rhae", "solved", "solved_games"}, rows);
  }
  if (res.contains("solve_frequency")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : res["solve_frequency"]) {
      rows.push_back({f["game"], std::to_string(f["solved_runs"].get<int>()), std::to_string(f["runs"].get<int>())});
    }
    write_csv(dir / "solve_frequency.csv", {"game", "solved_runs", "runs"}, rows);
  }
  if (res.contains("frontier")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : res["frontier"]) {
      auto get = [&](const char* k) { return f.contains(k) ? opt(f[k]) : std::string{}; };
      rows.push_back({f["policy"], fmt(f["speed"]), fmt(f["depth"]), f["on_frontier"] ? "true" : "false", f["game"],
                      f["depth_mode"], get("mean_actions"), get("se_actions"), get("analytic_actions"),
                      get("analytic_speed"), get("analytic_depth"), get("within_3se")});
    }
    write_csv(dir / "frontier.csv",
              {"policy", "speed", "depth", "on_frontier", "game", "depth_mode", "mean_actions", "se_actions",
               "analytic_actions", "analytic_speed", "analytic_depth", "within_3se"},
              rows);
  }
  if (res.contains("census")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : res["census"]) {
      rows.push_back({c["game"], c["tier"], c["category"], std::to_string(c["steps"].get<int>()), c["evidence"],
                      c["crash_win_reachable"] ? "true" : "false"});
    }
    write_csv(dir / "census.csv", {"game", "tier", "category", "steps", "evidence", "crash_win_reachable"}, rows);
  }
  if (res.contains("search")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : res["search"]) {
      std::string per;
      for (const auto& d : s["per_depth"]) per += (per.empty() ? "" : ";") + d.dump();
      rows.push_back({s["game"], std::to_string(s["max_depth"].get<int>()), s["sequences_enumerated"].dump(), per,
                      std::to_string(s["winning_sequences"].size())});
    }
    write_csv(dir / "search.csv", {"game", "max_depth", "sequences_enumerated", "per_depth", "winners"}, rows);
  }
  if (res.contains("scan")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : res["scan"]) {
      rows.push_back({s["game"], s["crash_win_reachable"] ? "true" : "false", opt(s["steps"])});
    }
    write_csv(dir / "scan.csv", {"game", "crash_win_reachable", "steps"}, rows);
  }
  json summary{{"experiment", to_string(r.experiment)}, {"config_digest", r.config_digest}, {"results", res},
               {"warnings", r.warnings}};
  json aggs = json::array();
  for (const auto& a : r.aggregates) aggs.push_back(aggregate_json(a));
  summary["aggregates"] = aggs;
  write_json(dir / "summary.json", summary);
}

}  // namespace

void persist(const ExperimentConfig& cfg, const RunRecord& record) {
  if (cfg.output.empty()) throw ValidationError("no output directory configured");
  fs::create_directories(cfg.output);
  write_json(cfg.output / "config.json", {{"source", cfg.source}, {"resolved", canonical_json(cfg)}});
  if (cfg.write_traces) {
    for (const auto& c : record.cells) {
      if (c.trace) write_trace(*c.trace, cfg.output / c.trace_file);
    }
  }
  json rr = record.to_json();
  rr["digest"] = record.digest();
  write_json(cfg.output / "run_record.json", rr);
  write_reports(cfg.output, record);
  write_json(cfg.output / "metadata.json", {{"finished_at", now_iso()},
                                             {"wall_time_secs", record.wall_time},
                                             {"jobs", cfg.jobs},
                                             {"tool_version", record.tool_version}});
}

json report(const fs::path& dir) {
  auto read = [&](const fs::path& p) {
    std::ifstream is(dir / p);
    if (!is) throw ValidationError("cannot read " + (dir / p).string());
    return json::parse(is);
  };
  const json rr = read("run_record.json");
  const json cfg = read("config.json");
  std::map<std::string, EnvironmentSpec> specs;
  for (const auto& g : cfg.at("resolved").at("games")) {
    EnvironmentSpec s = spec_from_json(g);
    specs.emplace(s.id, std::move(s));
  }
  std::map<std::string, std::vector<LevelResult>> by_agent;
  std::vector<std::string> order;
  int replayed = 0;
  for (const auto& l : rr.at("levels")) {
    if (l.contains("error")) continue;
    LevelResult lr;
    lr.game = l.at("game");
    lr.H = l.at("H");
    if (!l.at("A").is_null()) lr.A = l.at("A").get<int>();
    lr.solved = l.at("solved");
    lr.crash_win = l.at("crash_win");
    const std::string agent = l.at("agent");
    if (!by_agent.count(agent)) order.push_back(agent);
    by_agent[agent].push_back(lr);
    const std::string tf = l.at("trace");
    if (!tf.empty() && fs::exists(dir / tf)) {
      const EpisodeTrace t = read_trace(dir / tf);
      const std::string err = replay_trace(specs.at(lr.game), t);
      if (!err.empty()) throw ValidationError("trace " + tf + " does not replay: " + err);
      ++replayed;
    }
  }
  json out = json::array();
  for (const auto& agent : order) {
    json recomputed = nullptr;
    try {
      recomputed = rhae_aggregate(by_agent[agent]);
    } catch (const UndefinedMetricError&) {
    }
    for (const auto& a : rr.at("aggregates")) {
      if (a.at("agent") != agent) continue;
      const json& recorded = a.at("rhae");
      const bool same = recorded.is_null() ? recomputed.is_null()
                                           : !recomputed.is_null() &&
                                                 std::abs(recorded.get<double>() - recomputed.get<double>()) < 1e-12;
      if (!same) throw ValidationError("aggregate for '" + agent + "' does not match its level results");
    }
    out.push_back({{"agent", agent}, {"rhae", recomputed}, {"levels", by_agent[agent].size()}});
  }
  json rep{{"digest", rr.at("digest")}, {"recomputed", out}, {"traces_replayed", replayed}};
  write_json(dir / "report.json", rep);
  return rep;
}

}  // namespace hra
