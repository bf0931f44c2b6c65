#include "hra/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hra/belief.hpp"
#include "hra/digest.hpp"
#include "hra/errors.hpp"

namespace hra {

std::string to_string(BudgetMode m) {
  switch (m) {
    case BudgetMode::fixed: return "fixed";
    case BudgetMode::adaptive: return "adaptive";
    case BudgetMode::adaptive_small: return "adaptive-small";
  }
  return "?";
}

std::string to_string(HypothesisSource s) {
  return s == HypothesisSource::oracle_bayes ? "oracle-bayes" : "scripted-bias";
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::explore: return "explore";
    case Phase::verify: return "verify";
    case Phase::plan: return "plan";
  }
  return "?";
}

std::string to_string(TraceEventKind k) {
  switch (k) {
    case TraceEventKind::falsification: return "falsification";
    case TraceEventKind::surprise: return "surprise";
    case TraceEventKind::refusal: return "refusal";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::solved: return "solved";
    case Outcome::unsolved: return "unsolved";
    case Outcome::crash_win: return "crash-win";
  }
  return "?";
}

BudgetMode parse_budget_mode(const std::string& s) {
  if (s == "fixed") return BudgetMode::fixed;
  if (s == "adaptive") return BudgetMode::adaptive;
  if (s == "adaptive-small") return BudgetMode::adaptive_small;
  throw ValidationError("unknown budget mode '" + s + "'");
}

HypothesisSource parse_source(const std::string& s) {
  if (s == "oracle-bayes") return HypothesisSource::oracle_bayes;
  if (s == "scripted-bias") return HypothesisSource::scripted_bias;
  throw ValidationError("unknown hypothesis source '" + s + "'");
}

Phase parse_phase(const std::string& s) {
  if (s == "explore") return Phase::explore;
  if (s == "verify") return Phase::verify;
  if (s == "plan") return Phase::plan;
  throw ValidationError("unknown phase '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  if (s == "solved") return Outcome::solved;
  if (s == "unsolved") return Outcome::unsolved;
  if (s == "crash-win") return Outcome::crash_win;
  throw ValidationError("unknown outcome '" + s + "'");
}

void AgentConfig::validate() const {
  if (fixed_budget < 0) throw ValidationError("fixed budget must be >= 0");
  if (!(theta >= 0.0)) throw ValidationError("theta must be >= 0");
  if (verify_steps < 1 || verify_steps > 3) throw ValidationError("verify_steps must be 1, 2 or 3");
  if (action_cap < 1) throw ValidationError("action cap must be positive");
  if (!(strong_evidence > 0.0 && strong_evidence <= 1.0)) throw ValidationError("strong_evidence must lie in (0, 1]");
}

std::string AgentConfig::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(budget_mode) << '|' << fixed_budget << '|' << theta << '|' << verify_steps << '|' << action_cap
     << '|' << to_string(source) << '|' << action6_first_override << '|' << strong_evidence << '|' << seed;
  return hex_digest(fnv1a(os.str()));
}

int budget(int H, BudgetMode mode, int fixed_budget) {
  if (H < 1) throw ValidationError("reference action count must be >= 1");
  switch (mode) {
    case BudgetMode::fixed: return fixed_budget;
    case BudgetMode::adaptive: return std::max(5, std::min(30, (4 * H) / 10));
    case BudgetMode::adaptive_small: return std::max(2, std::min(5, (2 * H) / 10));
  }
  return 0;
}

int budget(int H, const AgentConfig& cfg) { return budget(H, cfg.budget_mode, cfg.fixed_budget); }

int EpisodeTrace::explore_actions() const {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) {
    return s.phase == Phase::explore;
  }));
}

double EpisodeTrace::explore_entropy_drop() const {
  double prev = initial_entropy, drop = 0.0;
  for (const auto& s : steps) {
    if (s.phase == Phase::explore) drop += prev - s.entropy;
    prev = s.entropy;
  }
  return drop;
}

void EpisodicMemory::record(std::uint64_t state_digest, const Action& action) {
  ring_[head_] = {state_digest, action};
  head_ = (head_ + 1) % kCapacity;
  size_ = std::min(size_ + 1, kCapacity);
}

bool EpisodicMemory::lookup(std::uint64_t state_digest, const Action& action) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (ring_[i].first == state_digest && ring_[i].second == action) return true;
  }
  return false;
}

bool memory_lookup(const EpisodicMemory& memory, std::uint64_t state_digest, const Action& action) {
  return memory.lookup(state_digest, action);
}

namespace {

constexpr double kGainEps = 1e-12;

class PhaseAgent {
 public:
  PhaseAgent(EpisodeState env, const AgentConfig& cfg)
      : game_(*env.game), env_(std::move(env)), cfg_(cfg), belief_(init_belief(game_)) {
    shadows_.assign(game_.hypothesis_count(), game_.initial_state());
    obs_ = observe(env_);
    Eigen::VectorXd lik = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(game_.hypothesis_count()));
    for (std::size_t h = 0; h < game_.hypothesis_count(); ++h) {
      if (belief_.in_support(h) && game_.observe(h, shadows_[h]) == obs_) lik(static_cast<Eigen::Index>(h)) = 1.0;
    }
    belief_ = update(belief_, lik);
    trace_.initial_entropy = entropy(belief_);
    trace_.explore_budget = budget(oracle_baseline(game_), cfg_);
    trace_.env_id = game_.spec().id;
    trace_.seed = env_.seed;
    trace_.config_digest = cfg_.digest();
    trace_.agent = "aera";
  }

  EpisodeTrace run() {
    const bool oracle = cfg_.source == HypothesisSource::oracle_bayes;
    while (!done()) {
      while (explore_used_ < trace_.explore_budget && entropy(belief_) > cfg_.theta && !done()) {
        const auto a = choose_explore();
        if (!a) break;
        act(Phase::explore, *a);
        ++explore_used_;
      }
      if (done()) break;
      if (explore_used_ == 0 && entropy(belief_) > cfg_.theta) {
        event(TraceEventKind::refusal, "no hypothesis formed");
        break;
      }
      if (verify()) continue;
      if (done()) break;
      if (oracle && entropy(belief_) > cfg_.theta) {
        event(TraceEventKind::refusal, belief_.map_id());
        break;
      }
      if (!plan()) break;
    }
    trace_.action_count = env_.action_count();
    trace_.terminated = env_.terminal();
    if (env_.crash_win) {
      trace_.outcome = Outcome::crash_win;
    } else if (env_.status() == Status::solved) {
      trace_.outcome = Outcome::solved;
    } else {
      trace_.outcome = Outcome::unsolved;
    }
    return std::move(trace_);
  }

 private:
  bool done() const { return env_.terminal() || env_.action_count() >= cfg_.action_cap; }
  bool weak() const { return belief_.weight(belief_.map_index()) < cfg_.strong_evidence; }
  bool scripted() const { return cfg_.source == HypothesisSource::scripted_bias; }

  void event(TraceEventKind k, std::string hyp) {
    trace_.events.push_back(TraceEvent{k, static_cast<int>(trace_.steps.size()), std::move(hyp)});
  }

  std::vector<Action> candidates() const {
    std::vector<Action> out;
    for (int k = 1; k <= 5; ++k) out.push_back(Action::move(static_cast<ActionKind>(k)));
    std::vector<Cell> cells = salient_cells(obs_.grid);
    cells.push_back(game_.center());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (const Cell& c : cells) out.push_back(Action::select(c.x, c.y));
    out.push_back(Action::move(ActionKind::undo));
    return out;
  }

  Observation predict(std::size_t h, const Action& a) const {
    SimState s = shadows_[h];
    game_.apply(h, s, a);
    return game_.observe(h, s);
  }

  // Predicted observation digest per support hypothesis (0 outside the support).
  std::vector<std::uint64_t> predictions(const Action& a) const {
    std::vector<std::uint64_t> out(game_.hypothesis_count(), 0);
    for (std::size_t h = 0; h < out.size(); ++h) {
      if (belief_.in_support(h)) out[h] = observation_digest(predict(h, a));
    }
    return out;
  }

  double info_gain(const Action& a) const {
    const auto pred = predictions(a);
    std::vector<std::uint64_t> outcomes;
    for (std::size_t h = 0; h < pred.size(); ++h) {
      if (belief_.in_support(h) && std::find(outcomes.begin(), outcomes.end(), pred[h]) == outcomes.end()) {
        outcomes.push_back(pred[h]);
      }
    }
    Eigen::MatrixXd model = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pred.size()),
                                                  static_cast<Eigen::Index>(outcomes.size()));
    for (std::size_t h = 0; h < pred.size(); ++h) {
      if (!belief_.in_support(h)) {
        model(static_cast<Eigen::Index>(h), 0) = 1.0;
        continue;
      }
      const auto col = std::find(outcomes.begin(), outcomes.end(), pred[h]) - outcomes.begin();
      model(static_cast<Eigen::Index>(h), col) = 1.0;
    }
    return expected_info_gain(belief_, model);
  }

  std::optional<Action> choose_explore() const {
    const std::uint64_t here = observation_digest(obs_, false);
    if (cfg_.action6_first_override && explore_used_ == 0 && at_prior_) {
      return Action::select(game_.center().x, game_.center().y);
    }
    if (scripted() && weak()) {
      for (int k = 1; k <= 5; ++k) {
        const Action a = Action::move(static_cast<ActionKind>(k));
        if (!memory_.lookup(here, a)) return a;
      }
      return std::nullopt;
    }
    const auto cands = candidates();
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < cands.size(); ++i) ranked.emplace_back(info_gain(cands[i]), i);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [gain, i] : ranked) {
      if (gain <= kGainEps) return std::nullopt;
      if (!memory_.lookup(here, cands[i])) return cands[i];
    }
    return std::nullopt;
  }

  // Returns true when the MAP hypothesis was falsified.
  bool verify() {
    for (int i = 0; i < cfg_.verify_steps && !done(); ++i) {
      if (belief_.support_size() <= 1) return false;
      const std::size_t map = belief_.map_index();
      std::optional<Action> pick;
      if (scripted() && weak()) {
        pick = Action::move(ActionKind::up);
      } else {
        double best = 0.0;
        double rest_mass = 1.0 - belief_.weight(map);
        for (const Action& a : candidates()) {
          const auto pred = predictions(a);
          double differ = 0.0;
          for (std::size_t h = 0; h < pred.size(); ++h) {
            if (h != map && belief_.in_support(h) && pred[h] != pred[map]) differ += belief_.weight(h);
          }
          differ /= rest_mass;
          if (differ > best + kGainEps) {
            best = differ;
            pick = a;
          }
        }
        if (!pick) return false;
      }
      const std::string map_id = belief_.map_id();
      act(Phase::verify, *pick);
      if (!belief_.in_support(map)) {
        event(TraceEventKind::falsification, map_id);
        return true;
      }
    }
    return false;
  }

  // Returns true when a surprise sends the agent back to EXPLORE.
  bool plan() {
    const bool oracle = cfg_.source == HypothesisSource::oracle_bayes;
    if (scripted() && weak()) {
      // Fallback: the first directional action until the episode ends.
      while (!done()) act(Phase::plan, Action::move(ActionKind::up));
      return false;
    }
    const std::size_t map = belief_.map_index();
    const std::vector<Action> seq = game_.plan(map, shadows_[map]);
    if (seq.empty()) {
      event(TraceEventKind::refusal, belief_.map_id());
      return false;
    }
    for (const Action& a : seq) {
      if (done()) return false;
      if (oracle && entropy(belief_) > cfg_.theta) {
        event(TraceEventKind::refusal, belief_.map_id());
        return false;
      }
      const Observation expected = predict(map, a);
      const std::string map_id = belief_.map_id();
      act(Phase::plan, a);
      if (!(obs_ == expected)) {
        event(TraceEventKind::surprise, map_id);
        return true;
      }
    }
    return false;
  }

  void act(Phase phase, const Action& a) {
    const std::uint64_t here = observation_digest(obs_, false);
    advance(env_, a);
    obs_ = observe(env_);
    Eigen::VectorXd lik = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(game_.hypothesis_count()));
    for (std::size_t h = 0; h < game_.hypothesis_count(); ++h) {
      if (!belief_.in_support(h)) continue;
      game_.apply(h, shadows_[h], a);
      if (game_.observe(h, shadows_[h]) == obs_) lik(static_cast<Eigen::Index>(h)) = 1.0;
    }
    belief_ = update(belief_, lik);
    if (at_prior_ && (belief_.weights() - game_.prior()).cwiseAbs().maxCoeff() > 1e-15) at_prior_ = false;
    memory_.record(here, a);
    trace_.steps.push_back(TraceStep{phase, a, observation_digest(obs_), entropy(belief_)});
  }

  const Game& game_;
  EpisodeState env_;
  AgentConfig cfg_;
  Belief belief_;
  std::vector<SimState> shadows_;
  Observation obs_;
  EpisodeTrace trace_;
  EpisodicMemory memory_;
  int explore_used_ = 0;
  bool at_prior_ = true;
};

}  // namespace

EpisodeTrace run_episode(EpisodeState env, const AgentConfig& cfg) {
  cfg.validate();
  if (env.action_count() != 0 || env.terminal()) throw ProtocolError("run_episode needs a freshly reset environment");
  return PhaseAgent(std::move(env), cfg).run();
}

std::string check_phase_grammar(const EpisodeTrace& trace) {
  auto rank = [](Phase p) { return static_cast<int>(p); };
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    if (rank(trace.steps[i].phase) >= rank(trace.steps[i - 1].phase)) continue;
    const bool reentry = std::any_of(trace.events.begin(), trace.events.end(), [&](const TraceEvent& e) {
      return e.step == static_cast<int>(i) &&
             (e.kind == TraceEventKind::falsification || e.kind == TraceEventKind::surprise);
    });
    if (!reentry) {
      return "step " + std::to_string(i) + " returns from " + to_string(trace.steps[i - 1].phase) + " to " +
             to_string(trace.steps[i].phase) + " without a surprise or falsification";
    }
  }
  if (static_cast<int>(trace.steps.size()) != trace.action_count) return "action_count differs from step count";
  return {};
}

}  // namespace hra
