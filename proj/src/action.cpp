#include "hra/action.hpp"

#include <charconv>

#include "hra/errors.hpp"

namespace hra {

std::string to_string(const Action& a) {
  std::string s = "A" + std::to_string(static_cast<int>(a.kind));
  if (a.null_coords) {
    s += "@null";
  } else if (a.coords) {
    s += "@" + std::to_string(a.coords->x) + "," + std::to_string(a.coords->y);
  }
  return s;
}

namespace {

int parse_int(std::string_view text, const std::string& whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("malformed action '" + whole + "'");
  }
  return v;
}

}  // namespace

Action parse_action(const std::string& text) {
  if (text.size() < 2 || (text[0] != 'A' && text[0] != 'a')) {
    throw ValidationError("malformed action '" + text + "'");
  }
  std::string_view body(text);
  body.remove_prefix(1);
  const auto at = body.find('@');
  Action a;
  a.kind = static_cast<std::uint8_t>(parse_int(body.substr(0, at), text));
  if (at == std::string_view::npos) return a;
  const auto coords = body.substr(at + 1);
  if (coords == "null") {
    a.null_coords = true;
    return a;
  }
  const auto comma = coords.find(',');
  if (comma == std::string_view::npos) throw ValidationError("malformed action '" + text + "'");
  a.coords = Cell{parse_int(coords.substr(0, comma), text), parse_int(coords.substr(comma + 1), text)};
  return a;
}

}  // namespace hra
