#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace hra {

// The seven legal moves. Values match the benchmark's ACTION1..ACTION7 numbering.
enum class ActionKind : std::uint8_t {
  up = 1,
  down = 2,
  left = 3,
  right = 4,
  interact = 5,
  cell_select = 6,
  undo = 7,
};

inline constexpr int kActionKinds = 7;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

// An action as submitted to an environment. `kind` is stored raw so that an
// out-of-range value can reach the environment and be rejected there.
struct Action {
  std::uint8_t kind = 1;
  std::optional<Cell> coords;
  // Cell-select issued with coordinates explicitly present but null.
  bool null_coords = false;

  static Action move(ActionKind k) { return Action{static_cast<std::uint8_t>(k), std::nullopt, false}; }
  static Action select(int x, int y) { return Action{6, Cell{x, y}, false}; }
  static Action null_select() { return Action{6, std::nullopt, true}; }
  static Action raw(int kind) { return Action{static_cast<std::uint8_t>(kind), std::nullopt, false}; }

  ActionKind action_kind() const { return static_cast<ActionKind>(kind); }
  bool valid_kind() const { return kind >= 1 && kind <= kActionKinds; }
  bool is(ActionKind k) const { return kind == static_cast<std::uint8_t>(k); }

  // Total order: kind first, then coordinates lexicographically.
  auto operator<=>(const Action&) const = default;
};

// "A1".."A7", with "@x,y" for cell-select and "@null" for the null probe.
std::string to_string(const Action& a);
Action parse_action(const std::string& text);

}  // namespace hra
