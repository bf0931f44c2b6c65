#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace hra {

// Row-major cell grid indexed (y, x); values 0..15.
using Grid = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMaxCellValue = 15;

enum class Status : std::uint8_t { not_finished, solved, failed };

std::string to_string(Status s);
Status parse_status(const std::string& s);

struct Observation {
  Grid grid;
  Status status = Status::not_finished;
  int level = 0;
  int step_index = 0;
  // Hypothesis index revealed by a perfectly informative probe (toy environment).
  std::optional<int> revealed;

  bool operator==(const Observation& o) const {
    return status == o.status && level == o.level && step_index == o.step_index &&
           revealed == o.revealed && grid.rows() == o.grid.rows() && grid.cols() == o.grid.cols() &&
           grid == o.grid;
  }
};

// Digest of everything the agent sees. `with_step` = false drops the step
// counter, giving a digest of the visible state only.
std::uint64_t observation_digest(const Observation& o, bool with_step = true);

// One row per string, one hex digit per cell.
std::string grid_row_hex(const Grid& g, int row);

}  // namespace hra
