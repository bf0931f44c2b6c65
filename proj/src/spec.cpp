#include "hra/spec.hpp"

#include <fstream>

#include "hra/errors.hpp"

namespace hra {

using nlohmann::json;

std::string to_string(Family f) {
  switch (f) {
    case Family::toy_estar: return "toy-estar";
    case Family::uis: return "uis";
    case Family::taxonomy_game: return "taxonomy-game";
  }
  return "?";
}

std::string to_string(Tier t) {
  switch (t) {
    case Tier::blind_1: return "blind-1";
    case Tier::probe_gated: return "probe-gated";
    case Tier::repeated_action: return "repeated-action";
    case Tier::coordinate_click: return "coordinate-click";
    case Tier::budget_constrained: return "budget-constrained";
    case Tier::unclassified: return "unclassified";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "toy-estar") return Family::toy_estar;
  if (s == "uis") return Family::uis;
  if (s == "taxonomy-game") return Family::taxonomy_game;
  throw ValidationError("unknown family '" + s + "'");
}

Tier parse_tier(const std::string& s) {
  if (s == "blind-1") return Tier::blind_1;
  if (s == "probe-gated") return Tier::probe_gated;
  if (s == "repeated-action" || s == "repeated") return Tier::repeated_action;
  if (s == "coordinate-click") return Tier::coordinate_click;
  if (s == "budget-constrained") return Tier::budget_constrained;
  if (s == "unclassified") return Tier::unclassified;
  throw ValidationError("unknown tier '" + s + "'");
}

json to_json(const EnvironmentSpec& spec) {
  json j;
  j["id"] = spec.id;
  j["family"] = to_string(spec.family);
  j["grid"] = {spec.width, spec.height};
  j["null_coord_fault"] = spec.null_coord_fault;
  if (spec.human_baseline) j["human_baseline"] = *spec.human_baseline;
  json p;
  if (const auto* e = std::get_if<EstarParams>(&spec.params)) {
    p = {{"k", e->k}, {"M", e->M}};
  } else if (const auto* u = std::get_if<UisParams>(&spec.params)) {
    p = {{"delta_h", u->delta_h}, {"alpha", u->alpha}, {"beta", u->beta}, {"k", u->k}, {"M", u->M}};
  } else {
    const auto& g = std::get<GameParams>(spec.params);
    p = {{"tier", to_string(g.tier)}, {"action", static_cast<int>(g.action)}, {"repeat", g.repeat}, {"seed", g.seed}};
    if (g.target) p["target"] = {g.target->x, g.target->y};
  }
  j["params"] = p;
  if (!spec.hypotheses.empty()) {
    json hs = json::array();
    for (const auto& h : spec.hypotheses) hs.push_back({{"id", h.id}, {"weight", h.weight}});
    j["hypotheses"] = hs;
  }
  return j;
}

EnvironmentSpec spec_from_json(const json& j) {
  try {
    EnvironmentSpec spec;
    spec.id = j.value("id", std::string{});
    spec.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("grid")) {
      spec.width = j.at("grid").at(0).get<int>();
      spec.height = j.at("grid").at(1).get<int>();
    }
    spec.null_coord_fault = j.value("null_coord_fault", false);
    if (j.contains("human_baseline") && !j.at("human_baseline").is_null()) {
      spec.human_baseline = j.at("human_baseline").get<int>();
    }
    const json& p = j.at("params");
    switch (spec.family) {
      case Family::toy_estar:
        spec.params = EstarParams{p.at("k").get<int>(), p.at("M").get<int>()};
        break;
      case Family::uis:
        spec.params = UisParams{p.at("delta_h").get<double>(), p.at("alpha").get<double>(),
                                p.at("beta").get<double>(), p.at("k").get<int>(), p.at("M").get<int>()};
        break;
      case Family::taxonomy_game: {
        GameParams g;
        g.tier = parse_tier(p.at("tier").get<std::string>());
        g.action = static_cast<ActionKind>(p.value("action", 6));
        g.repeat = p.value("repeat", 1);
        g.seed = p.value("seed", std::uint64_t{0});
        if (p.contains("target")) g.target = Cell{p.at("target").at(0).get<int>(), p.at("target").at(1).get<int>()};
        spec.params = g;
        break;
      }
    }
    if (j.contains("hypotheses")) {
      for (const auto& h : j.at("hypotheses")) {
        spec.hypotheses.push_back({h.at("id").get<std::string>(), h.at("weight").get<double>()});
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed spec: ") + e.what());
  }
}

EnvironmentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("spec file " + path.string() + " is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const EnvironmentSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write spec file " + path.string());
  out << to_json(spec).dump(2) << '\n';
}

}  // namespace hra
