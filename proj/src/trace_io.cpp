#include "hra/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "hra/digest.hpp"
#include "hra/errors.hpp"

namespace hra {

using nlohmann::json;

namespace {

std::uint64_t parse_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

json trace_summary_json(const EpisodeTrace& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    events.push_back({{"kind", to_string(e.kind)}, {"step", e.step}, {"hypothesis", e.hypothesis}});
  }
  return {{"type", "summary"},
          {"env_id", t.env_id},
          {"seed", t.seed},
          {"agent", t.agent},
          {"config_digest", t.config_digest},
          {"outcome", to_string(t.outcome)},
          {"terminated", t.terminated},
          {"action_count", t.action_count},
          {"explore_budget", t.explore_budget},
          {"explore_actions", t.explore_actions()},
          {"initial_entropy_nats", t.initial_entropy},
          {"explore_entropy_drop_nats", t.explore_entropy_drop()},
          {"verify_counts_against_budget", false},
          {"events", events}};
}

void write_trace(std::ostream& os, const EpisodeTrace& t) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    os << json{{"type", "step"},
               {"index", i},
               {"phase", to_string(s.phase)},
               {"action", to_string(s.action)},
               {"observation", hex_digest(s.observation_digest)},
               {"entropy_nats", s.entropy}}
              .dump()
       << '\n';
  }
  os << trace_summary_json(t).dump() << '\n';
}

void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write trace " + path.string());
  write_trace(os, trace);
}

EpisodeTrace read_trace(std::istream& is) {
  EpisodeTrace t;
  bool summary = false;
  std::string line;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (j.at("type") == "step") {
        t.steps.push_back(TraceStep{parse_phase(j.at("phase")), parse_action(j.at("action")),
                                    parse_hex(j.at("observation")), j.at("entropy_nats")});
      } else if (j.at("type") == "summary") {
        summary = true;
        t.env_id = j.at("env_id");
        t.seed = j.at("seed");
        t.agent = j.at("agent");
        t.config_digest = j.at("config_digest");
        t.outcome = parse_outcome(j.at("outcome"));
        t.terminated = j.at("terminated");
        t.action_count = j.at("action_count");
        t.explore_budget = j.at("explore_budget");
        t.initial_entropy = j.at("initial_entropy_nats");
        for (const auto& e : j.at("events")) {
          const std::string k = e.at("kind");
          TraceEventKind kind = k == "falsification" ? TraceEventKind::falsification
                                : k == "surprise"    ? TraceEventKind::surprise
                                                     : TraceEventKind::refusal;
          t.events.push_back(TraceEvent{kind, e.at("step"), e.at("hypothesis")});
        }
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed trace: ") + e.what());
  }
  if (!summary) throw ValidationError("trace has no summary record");
  return t;
}

EpisodeTrace read_trace(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read trace " + path.string());
  return read_trace(is);
}

std::string replay_trace(const EnvironmentSpec& spec, const EpisodeTrace& trace) {
  EpisodeState st = reset(spec, trace.seed);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (st.terminal()) return "episode ended before step " + std::to_string(i);
    advance(st, trace.steps[i].action);
    if (observation_digest(observe(st)) != trace.steps[i].observation_digest) {
      return "observation mismatch at step " + std::to_string(i);
    }
  }
  Outcome o = Outcome::unsolved;
  if (st.crash_win) {
    o = Outcome::crash_win;
  } else if (st.status() == Status::solved) {
    o = Outcome::solved;
  }
  if (o != trace.outcome) return "replayed outcome " + to_string(o) + " differs from recorded " + to_string(trace.outcome);
  if (st.action_count() != trace.action_count) return "action count differs";
  return {};
}

}  // namespace hra
