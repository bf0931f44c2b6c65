#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hra/agent.hpp"
#include "hra/curves.hpp"

namespace hra {

inline constexpr double kRatioCap = 1.15;
inline constexpr double kScoreCap = kRatioCap * kRatioCap;

double rhae_level(int H, int A);

struct LevelResult {
  std::string game;
  int H = 1;
  std::optional<int> A;  // absent when unsolved
  bool solved = false;
  bool crash_win = false;

  void validate() const;
  double score() const;  // 0 when unsolved
};

// Mean per-level score over non-crash-win levels; unsolved levels score 0.
// Throws UndefinedMetricError when nothing is left after exclusion.
double rhae_aggregate(const std::vector<LevelResult>& levels);

LevelResult level_result(const EpisodeTrace& trace, int H);

enum class DepthMode : std::uint8_t { per_action, per_episode };

struct FrontierPoint {
  std::string policy;
  double speed = 0.0;
  double depth = 0.0;
  bool per_episode = false;  // flagged normalisation
};

// Per-action mode: speed = mean 1/A, depth = mean (explore drop / explore
// actions). Per-episode mode: speed = 1/mean A, depth = mean explore drop.
// A is the action count of terminated episodes and `cap` otherwise.
FrontierPoint speed_depth(const std::vector<EpisodeTrace>& traces, int cap = 200,
                          DepthMode mode = DepthMode::per_action, std::string policy = {});

// Per-episode summary used when full traces are not kept.
struct EpisodeSummary {
  int actions = 0;
  bool terminated = true;
  int explore_actions = 0;
  double entropy_drop = 0.0;
};
FrontierPoint speed_depth(const std::vector<EpisodeSummary>& episodes, int cap = 200,
                          DepthMode mode = DepthMode::per_action, std::string policy = {});

bool dominates(const FrontierPoint& a, const FrontierPoint& b);
// Non-dominated points, ordered by speed descending (stable).
std::vector<FrontierPoint> pareto_frontier(const std::vector<FrontierPoint>& points);

struct Projection {
  double expected = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
};
Projection binomial_projection(int n_public, int solves, int n_private, double per_solve_score);

struct RunStatistics {
  double mean = 0.0;
  double std = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
  double t_critical = 0.0;
};
// Two-tailed 97.5% Student-t quantile; tabulated for df 1..29, normal beyond.
double t_critical(int df);
RunStatistics multi_run_ci(const std::vector<double>& values);

}  // namespace hra
