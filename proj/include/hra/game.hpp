#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hra/action.hpp"
#include "hra/observation.hpp"
#include "hra/spec.hpp"

namespace hra {

// ---- hypotheses -------------------------------------------------------------

struct EstarHypothesis {
  int index = 0;  // 0 -> h1, 1 -> h2
};

// Hidden bit string (one bit per probe cell) plus the number of distinct
// probes a committed plan needs to succeed.
struct UisHypothesis {
  std::uint32_t bits = 0;
  int threshold = 0;
};

// A taxonomy-game winning rule.
struct Rule {
  Tier tier = Tier::blind_1;
  ActionKind action = ActionKind::cell_select;
  Cell target{};
  int n = 1;
  bool operator==(const Rule&) const = default;
};

using Hypothesis = std::variant<EstarHypothesis, UisHypothesis, Rule>;

std::string rule_id(const Rule& r);
Rule parse_rule(const std::string& id);

// ---- simulation state ---------------------------------------------------------

// Restorable game state. Fields are grouped by family; unused groups stay at
// their defaults so digests are family-independent.
struct CoreState {
  Status status = Status::not_finished;
  // toy-estar / uis
  bool probed = false;
  std::uint8_t committed = 0;  // 0 none, else the committing action kind
  bool doomed = false;         // committed to a plan that cannot succeed
  int progress = 0;
  int waste = 0;
  std::uint32_t revealed = 0;  // uis: mask of probed bits
  int probes = 0;
  // taxonomy-game
  int cursor_x = 0;
  int cursor_y = 0;
  int streak = 0;
  bool probe_seen = false;
  bool lamp = false;
  std::vector<std::uint16_t> painted;  // sorted cell indices y*width+x

  bool operator==(const CoreState&) const = default;
};

struct UndoNode {
  CoreState state;
  std::shared_ptr<const UndoNode> prev;
};

// Core state plus the step counter and a bounded undo history. The history is
// a persistent list so copies are cheap.
struct SimState {
  CoreState core;
  int steps = 0;
  std::shared_ptr<const UndoNode> history;
  int history_depth = 0;
};

inline constexpr int kUndoDepth = 32;

struct StepEffect {
  bool fault = false;         // null-coordinate engine fault
  bool grid_changed = false;  // visible state changed
};

// ---- compiled game ------------------------------------------------------------

// A validated EnvironmentSpec with its hypothesis family materialised. All
// dynamics are deterministic given the hypothesis, so the same object serves
// as the true environment and as an agent's per-hypothesis world model.
class Game {
 public:
  // Throws ValidationError naming the violated invariant.
  static std::shared_ptr<const Game> compile(EnvironmentSpec spec);

  const EnvironmentSpec& spec() const { return spec_; }
  Family family() const { return spec_.family; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  Cell center() const { return Cell{spec_.width / 2, spec_.height / 2}; }

  std::size_t hypothesis_count() const { return hypotheses_.size(); }
  const Hypothesis& hypothesis(std::size_t i) const { return hypotheses_.at(i); }
  const std::vector<std::string>& hypothesis_ids() const { return ids_; }
  std::optional<std::size_t> find_hypothesis(const std::string& id) const;
  const Eigen::VectorXd& prior() const { return prior_; }
  // Taxonomy games always run their planted rule.
  std::optional<std::size_t> pinned_hypothesis() const { return pinned_; }

  SimState initial_state() const;

  // Applies `a` under hypothesis `h`. Throws InvalidActionError for malformed
  // actions and ProtocolError once the state is terminal. A null-coordinate
  // probe on a faulty game returns `fault` without touching the state.
  StepEffect apply(std::size_t h, SimState& s, const Action& a) const;

  Observation observe(std::size_t h, const SimState& s) const;

  // Digest of the restorable state and step counter (undo history excluded).
  std::uint64_t state_digest(const SimState& s) const;

  // Shortest winning action sequence from `s` if `h` is the hidden rule;
  // empty when no win is reachable.
  std::vector<Action> plan(std::size_t h, const SimState& s) const;

  // Length of the planted strategy (taxonomy games).
  int planted_length() const;
  const Rule& planted_rule() const;

  // uis helpers
  int uis_probe_count() const { return uis_probes_; }
  double uis_bit_probability() const { return uis_q_; }
  double uis_threshold_probability(int t) const;

  const Grid& decoration() const { return decoration_; }
  Cell target() const { return target_; }
  Cell lamp_cell() const { return Cell{spec_.width - 1, 0}; }

 private:
  Game() = default;
  void build_estar();
  void build_uis();
  void build_taxonomy();
  void check_action(const Action& a) const;

  EnvironmentSpec spec_;
  std::vector<Hypothesis> hypotheses_;
  std::vector<std::string> ids_;
  Eigen::VectorXd prior_;
  std::optional<std::size_t> pinned_;
  Grid decoration_;
  Cell target_{};
  Rule planted_{};
  int uis_probes_ = 0;
  double uis_q_ = 0.0;
};

// Binary entropy in nats.
double binary_entropy(double q);

// Cells whose value occurs exactly once in the grid, sorted by (x, y).
std::vector<Cell> salient_cells(const Grid& g);

}  // namespace hra
