#include "hra/observation.hpp"

#include "hra/digest.hpp"
#include "hra/errors.hpp"

namespace hra {

std::string to_string(Status s) {
  switch (s) {
    case Status::not_finished: return "not-finished";
    case Status::solved: return "solved";
    case Status::failed: return "failed";
  }
  return "?";
}

Status parse_status(const std::string& s) {
  if (s == "not-finished") return Status::not_finished;
  if (s == "solved") return Status::solved;
  if (s == "failed") return Status::failed;
  throw ValidationError("unknown status '" + s + "'");
}

std::uint64_t observation_digest(const Observation& o, bool with_step) {
  Fnv1a h;
  h.add(o.grid.rows()).add(o.grid.cols());
  h.bytes(o.grid.data(), static_cast<std::size_t>(o.grid.size()));
  h.add(o.status).add(o.level);
  h.add(o.revealed.value_or(-1));
  if (with_step) h.add(o.step_index);
  return h.value();
}

std::string grid_row_hex(const Grid& g, int row) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(static_cast<std::size_t>(g.cols()), '0');
  for (Eigen::Index x = 0; x < g.cols(); ++x) s[static_cast<std::size_t>(x)] = kHex[g(row, x) & 0xF];
  return s;
}

}  // namespace hra
