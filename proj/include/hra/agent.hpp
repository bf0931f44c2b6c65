#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hra/action.hpp"
#include "hra/env.hpp"

namespace hra {

enum class BudgetMode : std::uint8_t { fixed, adaptive, adaptive_small };
enum class HypothesisSource : std::uint8_t { oracle_bayes, scripted_bias };
enum class Phase : std::uint8_t { explore, verify, plan };

std::string to_string(BudgetMode m);
std::string to_string(HypothesisSource s);
std::string to_string(Phase p);
BudgetMode parse_budget_mode(const std::string& s);
HypothesisSource parse_source(const std::string& s);
Phase parse_phase(const std::string& s);

struct AgentConfig {
  BudgetMode budget_mode = BudgetMode::adaptive;
  int fixed_budget = 0;
  double theta = 0.1;  // commitment threshold, nats
  int verify_steps = 3;
  int action_cap = 200;
  HypothesisSource source = HypothesisSource::oracle_bayes;
  bool action6_first_override = false;
  // Scripted-bias commits to its MAP hypothesis only at or above this weight.
  double strong_evidence = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
  std::string digest() const;
};

// Explore budget for a level with reference action count H.
int budget(int H, BudgetMode mode, int fixed_budget = 0);
int budget(int H, const AgentConfig& cfg);

struct TraceStep {
  Phase phase = Phase::explore;
  Action action;
  std::uint64_t observation_digest = 0;
  double entropy = 0.0;  // belief entropy after the step, nats
};

enum class TraceEventKind : std::uint8_t { falsification, surprise, refusal };
std::string to_string(TraceEventKind k);

struct TraceEvent {
  TraceEventKind kind = TraceEventKind::refusal;
  int step = 0;  // number of steps recorded before the event
  std::string hypothesis;
};

enum class Outcome : std::uint8_t { solved, unsolved, crash_win };
std::string to_string(Outcome o);
Outcome parse_outcome(const std::string& s);

struct EpisodeTrace {
  std::vector<TraceStep> steps;
  std::vector<TraceEvent> events;
  Outcome outcome = Outcome::unsolved;
  // True when the environment itself ended the episode (solved or failed),
  // false for refusals and cap truncation.
  bool terminated = false;
  int action_count = 0;
  double initial_entropy = 0.0;
  int explore_budget = 0;
  std::string env_id;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string agent;

  int explore_actions() const;
  // Total entropy drop over explore-phase steps.
  double explore_entropy_drop() const;
};

// Fixed-capacity FIFO of (state digest, action) pairs.
class EpisodicMemory {
 public:
  static constexpr std::size_t kCapacity = 10;
  void record(std::uint64_t state_digest, const Action& action);
  bool lookup(std::uint64_t state_digest, const Action& action) const;
  std::size_t size() const { return size_; }

 private:
  std::array<std::pair<std::uint64_t, Action>, kCapacity> ring_{};
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

bool memory_lookup(const EpisodicMemory& memory, std::uint64_t state_digest, const Action& action);

// One EXPLORE/VERIFY/PLAN episode from a freshly reset environment.
EpisodeTrace run_episode(EpisodeState env, const AgentConfig& cfg);

// Checks explore* verify* plan* with re-entry only after a falsification or
// surprise event. Returns an empty string when valid, else the violation.
std::string check_phase_grammar(const EpisodeTrace& trace);

}  // namespace hra
