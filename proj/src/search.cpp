#include "hra/search.hpp"

#include <algorithm>
#include <chrono>

#include "hra/env.hpp"
#include "hra/errors.hpp"

namespace hra {

namespace {

std::vector<Action> canonical_actions(const Game& g) {
  std::vector<Action> out;
  for (int k = 1; k <= kActionKinds; ++k) {
    const auto kind = static_cast<ActionKind>(k);
    out.push_back(kind == ActionKind::cell_select ? Action::select(g.center().x, g.center().y) : Action::move(kind));
  }
  return out;
}

// Replays from reset; true on a legitimate win at the last action.
bool wins(const std::shared_ptr<const Game>& game, const std::vector<Action>& seq) {
  EpisodeState st = reset(game, 0);
  for (const Action& a : seq) {
    if (st.terminal()) return false;
    advance(st, a);
  }
  return st.status() == Status::solved && !st.crash_win;
}

}  // namespace

SearchResult exhaustive_search(const EnvironmentSpec& spec, int max_depth) {
  if (max_depth < 1 || max_depth > 4) throw ValidationError("max_depth must lie in 1..4");
  const auto start = std::chrono::steady_clock::now();
  const auto game = Game::compile(spec);
  const std::vector<Action> alphabet = canonical_actions(*game);
  SearchResult r;
  r.game_id = spec.id;
  r.max_depth = max_depth;
  for (int d = 1; d <= max_depth; ++d) {
    long long count = 0;
    std::vector<int> digits(static_cast<std::size_t>(d), 0);
    while (true) {
      std::vector<Action> seq;
      seq.reserve(digits.size());
      for (int i : digits) seq.push_back(alphabet[static_cast<std::size_t>(i)]);
      ++count;
      if (wins(game, seq)) r.winning_sequences.push_back(std::move(seq));
      int pos = d - 1;
      while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == kActionKinds) digits[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
    r.per_depth.push_back(count);
    r.sequences_enumerated += count;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

VulnResult vuln_scan(const EnvironmentSpec& spec) {
  EpisodeState st = reset(spec, 0);
  try {
    advance(st, Action::null_select());
  } catch (const InvalidActionError&) {
    return {};
  }
  if (st.crash_win) return VulnResult{true, st.action_count()};
  return {};
}

TaxonomyLabel taxonomy_classify(const EnvironmentSpec& spec, int budget) {
  if (budget < 1) throw ValidationError("classification budget must be positive");
  const auto game = Game::compile(spec);
  const std::vector<Action> alphabet = canonical_actions(*game);
  TaxonomyLabel label;
  label.crash_win_reachable = vuln_scan(spec).crash_win_reachable;
  auto found = [&](Tier t, std::vector<Action> seq) {
    label.tier = t;
    label.steps = static_cast<int>(seq.size());
    label.evidence = std::move(seq);
    return label;
  };

  // (1) single actions
  for (const Action& a : alphabet) {
    if (wins(game, {a})) return found(Tier::blind_1, {a});
  }

  // (2) short exhaustive search
  const SearchResult sr = exhaustive_search(spec, 3);
  if (!sr.winning_sequences.empty()) {
    const auto& seq = sr.winning_sequences.front();
    const bool same = std::all_of(seq.begin(), seq.end(), [&](const Action& a) { return a == seq.front(); });
    return found(same ? Tier::repeated_action : Tier::probe_gated, seq);
  }

  // (3) each action repeated up to the budget
  for (const Action& a : alphabet) {
    EpisodeState st = reset(game, 0);
    while (!st.terminal() && st.action_count() < budget) advance(st, a);
    if (st.status() == Status::solved && !st.crash_win) {
      return found(Tier::repeated_action, std::vector<Action>(static_cast<std::size_t>(st.action_count()), a));
    }
  }

  // (4) one probe, then a cell-select on each salient cell
  for (int k = 1; k <= 5; ++k) {
    const Action probe = Action::move(static_cast<ActionKind>(k));
    EpisodeState st = reset(game, 0);
    advance(st, probe);
    if (st.terminal()) continue;
    for (const Cell& c : salient_cells(observe(st).grid)) {
      const std::vector<Action> seq{probe, Action::select(c.x, c.y)};
      if (wins(game, seq)) return found(Tier::probe_gated, seq);
    }
  }

  // (4b) filler actions, then a cell-select on each salient cell
  const Action filler = Action::move(ActionKind::interact);
  const std::vector<Cell> cells = salient_cells(observe(reset(game, 0)).grid);
  for (int n = 1; n < budget; ++n) {
    for (const Cell& c : cells) {
      std::vector<Action> seq(static_cast<std::size_t>(n), filler);
      seq.push_back(Action::select(c.x, c.y));
      if (wins(game, seq)) return found(Tier::coordinate_click, seq);
    }
  }

  // (5) the scan result is already in crash_win_reachable
  return label;
}

Tier census_category(const TaxonomyLabel& label) {
  if (label.tier == Tier::unclassified) return Tier::unclassified;
  if (label.steps >= kBudgetConstrainedSteps) return Tier::budget_constrained;
  return label.tier;
}

}  // namespace hra
