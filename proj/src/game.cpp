#include "hra/game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "hra/digest.hpp"
#include "hra/errors.hpp"

namespace hra {

namespace {

constexpr std::uint8_t kTargetColor = 12;
constexpr std::uint8_t kPaintColor = 14;
constexpr std::uint8_t kCursorColor = 15;
constexpr std::uint8_t kLampOff = 10;
constexpr std::uint8_t kLampOn = 11;
constexpr int kMaxUisProbes = 8;

std::uint8_t kind_of(ActionKind k) { return static_cast<std::uint8_t>(k); }

bool same_visible(const CoreState& a, const CoreState& b) {
  return a.cursor_x == b.cursor_x && a.cursor_y == b.cursor_y && a.lamp == b.lamp && a.painted == b.painted &&
         a.revealed == b.revealed && a.probed == b.probed;
}

void push_history(SimState& s) {
  s.history = std::make_shared<const UndoNode>(UndoNode{s.core, s.history});
  ++s.history_depth;
  if (s.history_depth <= kUndoDepth) return;
  // Drop the oldest entry by rebuilding the newest kUndoDepth nodes.
  std::vector<const UndoNode*> keep;
  keep.reserve(kUndoDepth);
  for (const UndoNode* n = s.history.get(); n != nullptr && static_cast<int>(keep.size()) < kUndoDepth;
       n = n->prev.get()) {
    keep.push_back(n);
  }
  std::shared_ptr<const UndoNode> rebuilt;
  for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
    rebuilt = std::make_shared<const UndoNode>(UndoNode{(*it)->state, rebuilt});
  }
  s.history = std::move(rebuilt);
  s.history_depth = kUndoDepth;
}

// Commit/progress/waste bookkeeping shared by the toy and UIS families.
void apply_committed(CoreState& c, std::uint8_t kind, int k, int M) {
  if (c.doomed) {
    if (++c.waste >= M) c.status = Status::failed;
  } else if (kind == c.committed) {
    if (++c.progress >= k) c.status = Status::solved;
  }
}

void commit(CoreState& c, std::uint8_t kind, bool correct, int k, int M) {
  c.committed = kind;
  if (correct) {
    c.progress = 1;
    if (c.progress >= k) c.status = Status::solved;
  } else {
    c.doomed = true;
    c.waste = 1;
    if (c.waste >= M) c.status = Status::failed;
  }
}

Rule planted_from(const GameParams& g, Cell target) {
  Rule r;
  r.tier = g.tier;
  r.action = g.action;
  r.target = target;
  r.n = g.repeat;
  if (r.tier == Tier::probe_gated || r.tier == Tier::coordinate_click) r.action = ActionKind::cell_select;
  if (r.tier == Tier::blind_1 || r.tier == Tier::probe_gated) r.n = 1;
  if (r.tier != Tier::probe_gated && r.tier != Tier::coordinate_click) r.target = Cell{};
  return r;
}

}  // namespace

// ---- hypothesis identifiers ---------------------------------------------------

std::string rule_id(const Rule& r) {
  const std::string a = "A" + std::to_string(static_cast<int>(r.action));
  const std::string at = "@" + std::to_string(r.target.x) + "," + std::to_string(r.target.y);
  switch (r.tier) {
    case Tier::blind_1: return "blind-1:" + a;
    case Tier::probe_gated: return "probe-gated:" + a + at;
    case Tier::repeated_action: return "repeated:" + a + "x" + std::to_string(r.n);
    case Tier::coordinate_click: return "coordinate-click:" + a + at + "+" + std::to_string(r.n);
    default: break;
  }
  throw ValidationError("rule tier " + to_string(r.tier) + " cannot be planted");
}

Rule parse_rule(const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw ValidationError("malformed rule id '" + id + "'");
  Rule r;
  r.tier = parse_tier(id.substr(0, colon));
  const std::string body = id.substr(colon + 1);
  try {
    if (body.size() < 2 || body[0] != 'A') throw ValidationError("");
    std::size_t pos = 1;
    const int kind = std::stoi(body.substr(1), &pos);
    if (kind < 1 || kind > 6) throw ValidationError("");
    r.action = static_cast<ActionKind>(kind);
    std::string rest = body.substr(1 + pos);
    switch (r.tier) {
      case Tier::blind_1:
        if (!rest.empty()) throw ValidationError("");
        break;
      case Tier::repeated_action:
        if (rest.size() < 2 || rest[0] != 'x') throw ValidationError("");
        r.n = std::stoi(rest.substr(1));
        break;
      case Tier::probe_gated:
      case Tier::coordinate_click: {
        if (rest.empty() || rest[0] != '@') throw ValidationError("");
        const auto comma = rest.find(',');
        r.target.x = std::stoi(rest.substr(1, comma - 1));
        std::size_t used = 0;
        r.target.y = std::stoi(rest.substr(comma + 1), &used);
        rest = rest.substr(comma + 1 + used);
        if (r.tier == Tier::coordinate_click) {
          if (rest.size() < 2 || rest[0] != '+') throw ValidationError("");
          r.n = std::stoi(rest.substr(1));
        } else if (!rest.empty()) {
          throw ValidationError("");
        }
        break;
      }
      default: throw ValidationError("");
    }
  } catch (const std::exception&) {
    throw ValidationError("malformed rule id '" + id + "'");
  }
  return r;
}

namespace {

std::string uis_id(std::uint32_t bits, int n, int t) {
  std::string s = "b";
  for (int j = 0; j < n; ++j) s += ((bits >> j) & 1U) ? '1' : '0';
  return s + "/t" + std::to_string(t);
}

UisHypothesis parse_uis_id(const std::string& id, int n) {
  const auto slash = id.find("/t");
  if (id.empty() || id[0] != 'b' || slash == std::string::npos || static_cast<int>(slash) != n + 1) {
    throw ValidationError("malformed uis hypothesis id '" + id + "'");
  }
  UisHypothesis h;
  for (int j = 0; j < n; ++j) {
    const char c = id[static_cast<std::size_t>(j) + 1];
    if (c != '0' && c != '1') throw ValidationError("malformed uis hypothesis id '" + id + "'");
    if (c == '1') h.bits |= 1U << j;
  }
  try {
    h.threshold = std::stoi(id.substr(slash + 2));
  } catch (const std::exception&) {
    throw ValidationError("malformed uis hypothesis id '" + id + "'");
  }
  if (h.threshold < 0 || h.threshold > n) throw ValidationError("uis threshold out of range in '" + id + "'");
  return h;
}

}  // namespace

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log(q) - (1.0 - q) * std::log1p(-q);
}

std::vector<Cell> salient_cells(const Grid& g) {
  std::array<int, 16> count{};
  for (Eigen::Index i = 0; i < g.size(); ++i) ++count[g.data()[i] & 0xF];
  std::vector<Cell> out;
  for (Eigen::Index y = 0; y < g.rows(); ++y) {
    for (Eigen::Index x = 0; x < g.cols(); ++x) {
      if (count[g(y, x) & 0xF] == 1) out.push_back(Cell{static_cast<int>(x), static_cast<int>(y)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- compilation ----------------------------------------------------------------

std::shared_ptr<const Game> Game::compile(EnvironmentSpec spec) {
  std::shared_ptr<Game> g(new Game());
  g->spec_ = std::move(spec);
  const auto& s = g->spec_;
  if (s.width < 1 || s.height < 1 || s.width > 64 || s.height > 64) {
    throw ValidationError("grid dimensions must lie in 1..64");
  }
  if (s.human_baseline && *s.human_baseline < 1) throw ValidationError("human baseline must be positive");
  switch (s.family) {
    case Family::toy_estar:
      if (!std::holds_alternative<EstarParams>(s.params)) throw ValidationError("toy-estar spec needs k/M params");
      g->build_estar();
      break;
    case Family::uis:
      if (!std::holds_alternative<UisParams>(s.params)) throw ValidationError("uis spec needs uis params");
      g->build_uis();
      break;
    case Family::taxonomy_game:
      if (!std::holds_alternative<GameParams>(s.params)) throw ValidationError("taxonomy-game spec needs game params");
      g->build_taxonomy();
      break;
  }

  if (!s.hypotheses.empty()) {
    // Explicit family: parse ids against the family and take the declared prior.
    std::vector<Hypothesis> hyps;
    std::vector<std::string> ids;
    Eigen::VectorXd prior(static_cast<Eigen::Index>(s.hypotheses.size()));
    for (std::size_t i = 0; i < s.hypotheses.size(); ++i) {
      const auto& e = s.hypotheses[i];
      if (!(e.weight >= 0.0)) throw ValidationError("prior weight of '" + e.id + "' is negative");
      switch (s.family) {
        case Family::toy_estar:
          if (e.id != "h1" && e.id != "h2") throw ValidationError("toy-estar hypotheses must be h1 and h2");
          hyps.emplace_back(EstarHypothesis{e.id == "h1" ? 0 : 1});
          break;
        case Family::uis: hyps.emplace_back(parse_uis_id(e.id, g->uis_probes_)); break;
        case Family::taxonomy_game: hyps.emplace_back(parse_rule(e.id)); break;
      }
      ids.push_back(e.id);
      prior(static_cast<Eigen::Index>(i)) = e.weight;
    }
    if (std::abs(prior.sum() - 1.0) > 1e-12) throw ValidationError("prior weights must sum to 1 within 1e-12");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (ids[i] == ids[j]) throw ValidationError("duplicate hypothesis '" + ids[i] + "'");
      }
    }
    if (s.family == Family::toy_estar &&
        (ids.size() != 2 || std::abs(prior(0) - 0.5) > 1e-12 || std::abs(prior(1) - 0.5) > 1e-12)) {
      throw ValidationError("toy-estar prior must be exactly (1/2, 1/2) over two hypotheses");
    }
    g->hypotheses_ = std::move(hyps);
    g->ids_ = std::move(ids);
    g->prior_ = std::move(prior);
    if (s.family == Family::taxonomy_game) {
      const auto planted = g->find_hypothesis(rule_id(g->planted_));
      if (!planted) throw ValidationError("hypothesis space must contain the planted rule " + rule_id(g->planted_));
      g->pinned_ = planted;
    }
  }
  for (const auto& h : g->hypotheses_) {
    if (const auto* r = std::get_if<Rule>(&h)) {
      if (r->target.x < 0 || r->target.y < 0 || r->target.x >= s.width || r->target.y >= s.height) {
        throw ValidationError("rule target outside the grid");
      }
      if (r->n < 1) throw ValidationError("rule repeat count must be at least 1");
    }
  }
  return g;
}

void Game::build_estar() {
  const auto& p = std::get<EstarParams>(spec_.params);
  if (!(p.k >= 1)) throw ValidationError("toy-estar requires k >= 1");
  if (!(p.M > p.k)) throw ValidationError("toy-estar requires M > k");
  hypotheses_ = {EstarHypothesis{0}, EstarHypothesis{1}};
  ids_ = {"h1", "h2"};
  prior_ = Eigen::Vector2d(0.5, 0.5);
}

void Game::build_uis() {
  const auto& p = std::get<UisParams>(spec_.params);
  if (!(p.k >= 1)) throw ValidationError("uis requires k >= 1");
  if (!(p.M > p.k)) throw ValidationError("uis requires M > k");
  if (!(p.delta_h > 0.0 && p.delta_h <= std::numbers::ln2 + 1e-15)) {
    throw ValidationError("uis requires 0 < delta_h <= ln 2 (binary probes)");
  }
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw ValidationError("uis requires 0 <= alpha <= 1");
  if (!(p.beta >= 0.0)) throw ValidationError("uis requires beta >= 0");
  if (p.alpha < 1.0) {
    if (p.beta <= 0.0) throw ValidationError("uis requires beta > 0 when alpha < 1");
    const double need = (1.0 - p.alpha) / (p.beta * p.delta_h);
    if (need > kMaxUisProbes + 1e-9) throw ValidationError("uis needs more than 8 probes to reach certainty");
    uis_probes_ = static_cast<int>(std::ceil(need - 1e-9));
  }
  if (uis_probes_ > spec_.width) throw ValidationError("uis probe row does not fit the grid width");

  // Bit probability with binary entropy delta_h, on (0, 1/2].
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < p.delta_h ? lo : hi) = mid;
  }
  uis_q_ = 0.5 * (lo + hi);

  const int n = uis_probes_;
  const std::uint32_t patterns = 1U << n;
  prior_.resize(static_cast<Eigen::Index>(patterns) * (n + 1));
  Eigen::Index i = 0;
  for (int t = 0; t <= n; ++t) {
    const double pt = uis_threshold_probability(t);
    for (std::uint32_t bits = 0; bits < patterns; ++bits) {
      double w = pt;
      for (int j = 0; j < n; ++j) w *= ((bits >> j) & 1U) ? uis_q_ : 1.0 - uis_q_;
      hypotheses_.emplace_back(UisHypothesis{bits, t});
      ids_.push_back(uis_id(bits, n, t));
      prior_(i++) = w;
    }
  }
  prior_ /= prior_.sum();
}

double Game::uis_threshold_probability(int t) const {
  const auto& p = std::get<UisParams>(spec_.params);
  const int n = uis_probes_;
  if (t < 0 || t > n) return 0.0;
  if (n == 0) return 1.0;
  const double step = p.beta * p.delta_h;
  if (t == 0) return p.alpha;
  if (t < n) return step;
  return std::max(0.0, 1.0 - p.alpha - (n - 1) * step);
}

void Game::build_taxonomy() {
  const auto& p = std::get<GameParams>(spec_.params);
  if (spec_.width < 8 || spec_.height < 8) throw ValidationError("taxonomy games need at least an 8x8 grid");
  switch (p.tier) {
    case Tier::blind_1:
      if (p.action == ActionKind::undo || static_cast<int>(p.action) < 1 || static_cast<int>(p.action) > 6) {
        throw ValidationError("blind-1 winning action must be ACTION1..ACTION6");
      }
      break;
    case Tier::repeated_action:
      if (static_cast<int>(p.action) < 1 || static_cast<int>(p.action) > 5) {
        throw ValidationError("repeated winning action must be ACTION1..ACTION5");
      }
      if (p.repeat < 1) throw ValidationError("repeat count must be at least 1");
      break;
    case Tier::probe_gated: break;
    case Tier::coordinate_click:
      if (p.repeat < 2) throw ValidationError("coordinate-click step count must be at least 2");
      break;
    default: throw ValidationError("tier " + to_string(p.tier) + " cannot be planted");
  }

  // Decoration: rectangles of colours 1..9; no decoration colour is left unique.
  std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ULL);
  const int W = spec_.width, H = spec_.height;
  decoration_ = Grid::Zero(H, W);
  for (int i = 0; i < 12; ++i) {
    const int color = 1 + i % 9;
    const int w = 2 + static_cast<int>(rng() % 4), h = 2 + static_cast<int>(rng() % 4);
    const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(W - w + 1));
    const int y0 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(H - h));
    decoration_.block(y0, x0, std::min(h, H - y0), w).setConstant(static_cast<std::uint8_t>(color));
  }
  std::array<int, 16> count{};
  for (Eigen::Index i = 0; i < decoration_.size(); ++i) ++count[decoration_.data()[i]];
  for (Eigen::Index i = 0; i < decoration_.size(); ++i) {
    if (count[decoration_.data()[i]] == 1) decoration_.data()[i] = 0;
  }

  const Cell c = center();
  auto acceptable = [&](Cell t) {
    return t.x >= 0 && t.y >= 1 && t.x < W && t.y < H && std::abs(t.x - c.x) + std::abs(t.y - c.y) >= 4 &&
           !(t.x == W - 1 && t.y == 0);
  };
  if (p.target) {
    if (!acceptable(*p.target)) {
      throw ValidationError("target must be in bounds, off row 0 and at least 4 cells from the centre");
    }
    target_ = *p.target;
  } else {
    do {
      target_ = Cell{static_cast<int>(rng() % static_cast<std::uint64_t>(W)),
                     static_cast<int>(rng() % static_cast<std::uint64_t>(H))};
    } while (!acceptable(target_));
  }
  planted_ = planted_from(p, target_);

  if (spec_.hypotheses.empty()) {
    std::vector<Rule> rules;
    for (int a = 1; a <= 6; ++a) rules.push_back(Rule{Tier::blind_1, static_cast<ActionKind>(a), Cell{}, 1});
    rules.push_back(Rule{Tier::probe_gated, ActionKind::cell_select, target_, 1});
    const int nc = planted_.tier == Tier::coordinate_click ? planted_.n : 2;
    rules.push_back(Rule{Tier::coordinate_click, ActionKind::cell_select, target_, nc});
    const int nr = planted_.tier == Tier::repeated_action ? planted_.n : 50;
    rules.push_back(Rule{Tier::repeated_action, ActionKind::up, Cell{}, nr});
    rules.push_back(Rule{Tier::repeated_action, ActionKind::down, Cell{}, nr});
    if (std::find(rules.begin(), rules.end(), planted_) == rules.end()) rules.push_back(planted_);
    for (const auto& r : rules) {
      hypotheses_.emplace_back(r);
      ids_.push_back(rule_id(r));
    }
    prior_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rules.size()), 1.0 / static_cast<double>(rules.size()));
    pinned_ = find_hypothesis(rule_id(planted_));
  }
}

std::optional<std::size_t> Game::find_hypothesis(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

const Rule& Game::planted_rule() const {
  if (spec_.family != Family::taxonomy_game) throw ValidationError("only taxonomy games have a planted rule");
  return planted_;
}

int Game::planted_length() const {
  const Rule& r = planted_rule();
  switch (r.tier) {
    case Tier::blind_1: return 1;
    case Tier::probe_gated: return 2;
    case Tier::repeated_action: return r.n;
    case Tier::coordinate_click: return r.n + 1;
    default: return 0;
  }
}

// ---- dynamics -------------------------------------------------------------------

SimState Game::initial_state() const {
  SimState s;
  if (spec_.family == Family::taxonomy_game) {
    s.core.cursor_x = center().x;
    s.core.cursor_y = center().y;
  }
  return s;
}

void Game::check_action(const Action& a) const {
  if (!a.valid_kind()) throw InvalidActionError("unknown action kind " + std::to_string(static_cast<int>(a.kind)));
  if (a.is(ActionKind::cell_select)) {
    if (a.null_coords) return;
    if (!a.coords) throw InvalidActionError("cell-select requires coordinates");
    if (a.coords->x < 0 || a.coords->y < 0 || a.coords->x >= spec_.width || a.coords->y >= spec_.height) {
      throw InvalidActionError("coordinates (" + std::to_string(a.coords->x) + "," + std::to_string(a.coords->y) +
                               ") outside the grid");
    }
  } else if (a.coords || a.null_coords) {
    throw InvalidActionError("only cell-select takes coordinates");
  }
}

StepEffect Game::apply(std::size_t h, SimState& s, const Action& a) const {
  if (s.core.status != Status::not_finished) throw ProtocolError("step after terminal status");
  check_action(a);
  if (a.null_coords) {
    if (spec_.null_coord_fault) return StepEffect{true, false};
    throw InvalidActionError("cell-select with null coordinates");
  }
  const Hypothesis& hyp = hypotheses_.at(h);
  const int steps_before = s.steps;
  ++s.steps;

  if (a.is(ActionKind::undo)) {
    if (!s.history) return {};
    const CoreState before = s.core;
    s.core = s.history->state;
    s.history = s.history->prev;
    --s.history_depth;
    return StepEffect{false, !same_visible(before, s.core)};
  }
  push_history(s);
  CoreState& c = s.core;
  const std::uint8_t kind = a.kind;

  if (const auto* e = std::get_if<EstarHypothesis>(&hyp)) {
    const auto& p = std::get<EstarParams>(spec_.params);
    const std::uint8_t right_plan = e->index == 0 ? kind_of(ActionKind::up) : kind_of(ActionKind::down);
    if (c.committed != 0) {
      apply_committed(c, kind, p.k, p.M);
    } else if (a.is(ActionKind::interact)) {
      const bool changed = !c.probed;
      c.probed = true;
      return StepEffect{false, changed};
    } else if (a.is(ActionKind::up) || a.is(ActionKind::down)) {
      commit(c, kind, kind == right_plan, p.k, p.M);
    }
    return {};
  }

  if (const auto* u = std::get_if<UisHypothesis>(&hyp)) {
    const auto& p = std::get<UisParams>(spec_.params);
    if (c.committed != 0) {
      apply_committed(c, kind, p.k, p.M);
    } else if (a.is(ActionKind::cell_select) && a.coords->y == 0 && a.coords->x < uis_probes_) {
      const std::uint32_t bit = 1U << a.coords->x;
      if ((c.revealed & bit) == 0) {
        c.revealed |= bit;
        ++c.probes;
        return StepEffect{false, true};
      }
    } else if (a.is(ActionKind::up)) {
      commit(c, kind, c.probes >= u->threshold, p.k, p.M);
    }
    return {};
  }

  const Rule& r = std::get<Rule>(hyp);
  const CoreState before = c;
  switch (a.action_kind()) {
    case ActionKind::up: c.cursor_y = std::max(0, c.cursor_y - 1); break;
    case ActionKind::down: c.cursor_y = std::min(spec_.height - 1, c.cursor_y + 1); break;
    case ActionKind::left: c.cursor_x = std::max(0, c.cursor_x - 1); break;
    case ActionKind::right: c.cursor_x = std::min(spec_.width - 1, c.cursor_x + 1); break;
    case ActionKind::interact: c.lamp = !c.lamp; break;
    case ActionKind::cell_select: {
      const auto idx = static_cast<std::uint16_t>(a.coords->y * spec_.width + a.coords->x);
      auto it = std::lower_bound(c.painted.begin(), c.painted.end(), idx);
      if (it != c.painted.end() && *it == idx) {
        c.painted.erase(it);
      } else {
        c.painted.insert(it, idx);
      }
      break;
    }
    case ActionKind::undo: break;
  }
  const bool changed = !same_visible(before, c);
  if (r.tier == Tier::repeated_action) c.streak = kind == kind_of(r.action) ? c.streak + 1 : 0;

  const bool at_target = a.is(ActionKind::cell_select) && *a.coords == r.target;
  bool win = false;
  switch (r.tier) {
    case Tier::blind_1: win = kind == kind_of(r.action); break;
    case Tier::repeated_action: win = c.streak >= r.n; break;
    case Tier::probe_gated: win = at_target && before.probe_seen; break;
    case Tier::coordinate_click: win = at_target && steps_before >= r.n; break;
    default: break;
  }
  if (win) {
    c.status = Status::solved;
  } else if (!a.is(ActionKind::cell_select) && changed) {
    c.probe_seen = true;
  }
  return StepEffect{false, changed};
}

Observation Game::observe(std::size_t h, const SimState& s) const {
  Observation o;
  o.status = s.core.status;
  o.step_index = s.steps;
  const auto& c = s.core;
  switch (spec_.family) {
    case Family::toy_estar:
      o.grid = Grid::Zero(spec_.height, spec_.width);
      if (c.probed) o.revealed = std::get<EstarHypothesis>(hypotheses_.at(h)).index;
      break;
    case Family::uis: {
      o.grid = Grid::Zero(spec_.height, spec_.width);
      const auto& u = std::get<UisHypothesis>(hypotheses_.at(h));
      for (int j = 0; j < uis_probes_; ++j) {
        const bool shown = (c.revealed >> j) & 1U;
        o.grid(0, j) = static_cast<std::uint8_t>(shown ? 11 + ((u.bits >> j) & 1U) : 1 + j);
      }
      break;
    }
    case Family::taxonomy_game: {
      o.grid = decoration_;
      o.grid(target_.y, target_.x) = kTargetColor;
      for (const auto idx : c.painted) o.grid.data()[idx] = kPaintColor;
      o.grid(c.cursor_y, c.cursor_x) = kCursorColor;
      const Cell lamp = lamp_cell();
      o.grid(lamp.y, lamp.x) = c.lamp ? kLampOn : kLampOff;
      break;
    }
  }
  return o;
}

std::uint64_t Game::state_digest(const SimState& s) const {
  const auto& c = s.core;
  Fnv1a h;
  h.add(c.status).add(c.probed).add(c.committed).add(c.doomed).add(c.progress).add(c.waste);
  h.add(c.revealed).add(c.probes).add(c.cursor_x).add(c.cursor_y).add(c.streak).add(c.probe_seen).add(c.lamp);
  h.add(c.painted.size());
  for (const auto p : c.painted) h.add(p);
  h.add(s.steps);
  return h.value();
}

std::vector<Action> Game::plan(std::size_t h, const SimState& s) const {
  const auto& c = s.core;
  if (c.status != Status::not_finished) return {};
  const Hypothesis& hyp = hypotheses_.at(h);
  std::vector<Action> out;

  if (const auto* e = std::get_if<EstarHypothesis>(&hyp)) {
    const auto& p = std::get<EstarParams>(spec_.params);
    const auto right = e->index == 0 ? ActionKind::up : ActionKind::down;
    if (c.committed != 0 && (c.doomed || c.committed != kind_of(right))) return {};
    out.assign(static_cast<std::size_t>(p.k - c.progress), Action::move(right));
    return out;
  }

  if (const auto* u = std::get_if<UisHypothesis>(&hyp)) {
    const auto& p = std::get<UisParams>(spec_.params);
    if (c.committed != 0) {
      if (c.doomed) return {};
      out.assign(static_cast<std::size_t>(p.k - c.progress), Action::move(ActionKind::up));
      return out;
    }
    int probes = c.probes;
    for (int j = 0; j < uis_probes_ && probes < u->threshold; ++j) {
      if (((c.revealed >> j) & 1U) == 0) {
        out.push_back(Action::select(j, 0));
        ++probes;
      }
    }
    if (probes < u->threshold) return {};
    out.insert(out.end(), static_cast<std::size_t>(p.k), Action::move(ActionKind::up));
    return out;
  }

  const Rule& r = std::get<Rule>(hyp);
  const auto make = [&](ActionKind k) {
    return k == ActionKind::cell_select ? Action::select(center().x, center().y) : Action::move(k);
  };
  switch (r.tier) {
    case Tier::blind_1: out.push_back(make(r.action)); break;
    case Tier::repeated_action: out.assign(static_cast<std::size_t>(r.n - c.streak), make(r.action)); break;
    case Tier::probe_gated:
      if (!c.probe_seen) out.push_back(Action::move(ActionKind::interact));
      out.push_back(Action::select(r.target.x, r.target.y));
      break;
    case Tier::coordinate_click:
      for (int i = s.steps; i < r.n; ++i) out.push_back(Action::move(ActionKind::interact));
      out.push_back(Action::select(r.target.x, r.target.y));
      break;
    default: break;
  }
  return out;
}

}  // namespace hra
