#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "hra/agent.hpp"

namespace hra {

// Line-delimited records: one {"type":"step"} object per action, then one
// {"type":"summary"} object. Entropies are in nats; digests are 16 hex digits.
void write_trace(std::ostream& os, const EpisodeTrace& trace);
void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path);
EpisodeTrace read_trace(std::istream& is);
EpisodeTrace read_trace(const std::filesystem::path& path);

nlohmann::json trace_summary_json(const EpisodeTrace& trace);

// Re-executes the trace's actions from reset(spec, trace.seed) and checks every
// observation digest and the final outcome. Returns an empty string on success.
std::string replay_trace(const EnvironmentSpec& spec, const EpisodeTrace& trace);

}  // namespace hra
