#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hra/action.hpp"
#include "hra/spec.hpp"

namespace hra {

struct SearchResult {
  std::string game_id;
  long long sequences_enumerated = 0;           // cumulative over depths 1..max_depth
  std::vector<long long> per_depth;             // per_depth[d-1] = sequences of length d
  std::vector<std::vector<Action>> winning_sequences;
  int max_depth = 0;
  double wall_time = 0.0;  // seconds
};

// All sequences over the seven kinds up to `max_depth` (cell-select at the grid
// center), each replayed from reset.
SearchResult exhaustive_search(const EnvironmentSpec& spec, int max_depth);

struct VulnResult {
  bool crash_win_reachable = false;
  std::optional<int> steps;
};

VulnResult vuln_scan(const EnvironmentSpec& spec);

struct TaxonomyLabel {
  Tier tier = Tier::unclassified;
  std::vector<Action> evidence;  // the winning strategy
  int steps = 0;                 // its length
  bool crash_win_reachable = false;
};

TaxonomyLabel taxonomy_classify(const EnvironmentSpec& spec, int budget = 200);

// Census grouping: strategies that need at least this many steps are
// budget-constrained regardless of their mechanical tier.
inline constexpr int kBudgetConstrainedSteps = 50;
Tier census_category(const TaxonomyLabel& label);

}  // namespace hra
