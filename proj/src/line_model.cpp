#include "rdv/line_model.hpp"

#include <algorithm>

#include "rdv/errors.hpp"

namespace rdv {

std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kNoGift: return "g";
    case GameKind::kOneGift: return "g1";
    case GameKind::kTwoGiftsOr: return "g2or";
    case GameKind::kTwoGiftsAnd: return "g2and";
  }
  return "?";
}

GameKind parse_game_kind(std::string_view text) {
  if (text == "g") return GameKind::kNoGift;
  if (text == "g1") return GameKind::kOneGift;
  if (text == "g2or") return GameKind::kTwoGiftsOr;
  if (text == "g2and") return GameKind::kTwoGiftsAnd;
  throw ConfigError("unknown game kind '" + std::string(text) + "' (expected g, g1, g2or, g2and)");
}

const ScenarioFrame& scenario_frame(int id) {
  if (id < 1 || id > 4) throw ModelError("scenario id must be 1..4, got " + std::to_string(id));
  return kScenarios[static_cast<std::size_t>(id - 1)];
}

GameInstance GameInstance::make(GameKind kind, const Rational& distance,
                                std::optional<Rational> drop_one,
                                std::optional<Rational> drop_two,
                                std::optional<Rational> horizon) {
  if (distance.sign() <= 0) throw ConfigError("initial distance must be positive");
  if (drop_one.has_value() != player_one_drops(kind)) {
    throw ConfigError(std::string("game ") + std::string(to_string(kind)) +
                      (player_one_drops(kind) ? " requires" : " does not allow") +
                      " a Player I drop time");
  }
  if (drop_two.has_value() != player_two_drops(kind)) {
    throw ConfigError(std::string("game ") + std::string(to_string(kind)) +
                      (player_two_drops(kind) ? " requires" : " does not allow") +
                      " a Player II drop time");
  }
  GameInstance inst;
  inst.kind = kind;
  inst.distance = distance;
  inst.drop_one = drop_one;
  inst.drop_two = drop_two;
  inst.horizon = horizon.value_or(distance * 4);
  if (inst.horizon.sign() <= 0) throw ConfigError("horizon must be positive");
  for (const auto& drop : {drop_one, drop_two}) {
    if (!drop) continue;
    if (drop->sign() < 0) throw ConfigError("drop times must be non-negative");
    if (*drop > inst.horizon) throw ConfigError("drop time " + drop->str() + " exceeds horizon");
  }
  return inst;
}

// PathPlan -------------------------------------------------------------------

PathPlan::PathPlan(std::vector<Waypoint> waypoints, int terminal_direction)
    : waypoints_(std::move(waypoints)), terminal_direction_(terminal_direction) {
  if (waypoints_.empty() || !waypoints_.front().time.is_zero() ||
      !waypoints_.front().position.is_zero()) {
    throw ModelError("path must start at (0, 0)");
  }
  if (terminal_direction_ != 1 && terminal_direction_ != -1) {
    throw ModelError("terminal direction must be +1 or -1");
  }
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const Rational dt = waypoints_[i].time - waypoints_[i - 1].time;
    if (dt.sign() <= 0) throw ModelError("waypoint times must be strictly increasing");
    if (abs(waypoints_[i].position - waypoints_[i - 1].position) > dt) {
      throw ModelError("path exceeds unit speed before t=" + waypoints_[i].time.str());
    }
  }
}

PathPlan PathPlan::from_turning_points(const std::vector<Rational>& turns) {
  std::vector<Waypoint> pts{{Rational(0), Rational(0)}};
  int dir = +1;
  for (const auto& t : turns) {
    const auto& last = pts.back();
    if (t <= last.time) throw ModelError("turning points must be strictly increasing and positive");
    pts.push_back({t, last.position + (t - last.time) * dir});
    dir = -dir;
  }
  return PathPlan(std::move(pts), dir);
}

Rational PathPlan::at(const Rational& t) const {
  auto it = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                             [](const Rational& v, const Waypoint& w) { return v < w.time; });
  if (it == waypoints_.begin()) throw ModelError("path queried at negative time " + t.str());
  const Waypoint& lo = *(it - 1);
  if (it == waypoints_.end()) return lo.position + (t - lo.time) * terminal_direction_;
  const Waypoint& hi = *it;
  return lo.position + (hi.position - lo.position) * (t - lo.time) / (hi.time - lo.time);
}

std::vector<Rational> PathPlan::breakpoints() const {
  std::vector<Rational> out;
  out.reserve(waypoints_.size());
  for (std::size_t i = 1; i < waypoints_.size(); ++i) out.push_back(waypoints_[i].time);
  return out;
}

PathPlan PathPlan::simplified() const {
  auto slope = [](const Waypoint& a, const Waypoint& b) {
    return (b.position - a.position) / (b.time - a.time);
  };
  std::vector<Waypoint> pts{waypoints_.front()};
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    Rational next_slope = i + 1 < waypoints_.size() ? slope(waypoints_[i], waypoints_[i + 1])
                                                    : Rational(terminal_direction_);
    if (slope(pts.back(), waypoints_[i]) != next_slope) pts.push_back(waypoints_[i]);
  }
  PathPlan out;
  out.waypoints_ = std::move(pts);
  out.terminal_direction_ = terminal_direction_;
  return out;
}

bool operator==(const PathPlan& a, const PathPlan& b) {
  PathPlan sa = a.simplified();
  PathPlan sb = b.simplified();
  return sa.waypoints_ == sb.waypoints_ && sa.terminal_direction_ == sb.terminal_direction_;
}

// Observations and tree keys ----------------------------------------------------

std::string_view to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::kMetAgent: return "MET";
    case ObservationKind::kFoundGift: return "FOUND";
    case ObservationKind::kAbsence: return "ABSENT";
    case ObservationKind::kDropExecuted: return "DROP";
  }
  return "?";
}

std::string_view to_string(NodeKey key) {
  switch (key) {
    case NodeKey::kRoot: return "ROOT";
    case NodeKey::kNone: return "NONE";
    case NodeKey::kMet: return "MET";
    case NodeKey::kFound: return "FOUND";
    case NodeKey::kAbsent: return "ABSENT";
    case NodeKey::kDrop: return "DROP";
  }
  return "?";
}

NodeKey parse_node_key(std::string_view text) {
  if (text == "ROOT") return NodeKey::kRoot;
  if (text == "NONE") return NodeKey::kNone;
  if (text == "MET") return NodeKey::kMet;
  if (text == "FOUND") return NodeKey::kFound;
  if (text == "ABSENT") return NodeKey::kAbsent;
  if (text == "DROP") return NodeKey::kDrop;
  throw ConfigError("unknown observation key '" + std::string(text) + "'");
}

DecisionNode plan_from_turning_points(const std::vector<Rational>& turns) {
  PathPlan path = PathPlan::from_turning_points(turns);  // validates
  const auto& pts = path.waypoints();
  DecisionNode root;
  root.time = Rational(0);
  root.key = NodeKey::kRoot;
  root.position = Rational(0);
  root.direction = +1;
  DecisionNode* cur = &root;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    DecisionNode child;
    child.time = pts[i].time;
    child.key = NodeKey::kNone;
    child.position = pts[i].position;
    child.direction = -cur->direction;
    cur->children.push_back(std::move(child));
    cur = &cur->children.back();
  }
  return root;
}

DecisionNode canonicalize(const DecisionNode& root) {
  DecisionNode out = root;
  out.children.clear();
  for (const auto& c : root.children) out.children.push_back(canonicalize(c));
  while (out.children.size() == 1 && out.children[0].key == NodeKey::kNone &&
         out.children[0].scenarios.empty() && out.children[0].direction == out.direction) {
    std::vector<DecisionNode> grand = std::move(out.children[0].children);
    out.children = std::move(grand);
  }
  return out;
}

StrategyBundle canonicalize(const StrategyBundle& bundle) {
  return {canonicalize(bundle.player_one), canonicalize(bundle.player_two)};
}

// Outcomes ------------------------------------------------------------------------

Outcome make_outcome(const std::array<std::optional<Rational>, 4>& end_times) {
  Outcome out;
  out.end_times = end_times;
  Rational sum(0);
  bool all = true;
  for (const auto& t : end_times) {
    if (t) {
      out.ordered_times.push_back(*t);
      sum += *t;
    } else {
      all = false;
    }
  }
  std::sort(out.ordered_times.begin(), out.ordered_times.end());
  if (all) out.value = sum / 4;
  return out;
}

Rational agent_position(const GameInstance& instance, const ScenarioFrame& frame,
                        const PathPlan& g, const Rational& t) {
  if (t.sign() < 0 || t > instance.horizon) {
    throw ModelError("time " + t.str() + " outside [0, " + instance.horizon.str() + "]");
  }
  return instance.distance * frame.sigma + g.at(t) * frame.epsilon;
}

Rational gift_position(const GameInstance& instance, Player dropper, const ScenarioFrame& frame,
                       const PathPlan& path) {
  const auto& drop = instance.drop_of(dropper);
  if (!drop) {
    throw ModelError(std::string("Player ") + (dropper == Player::kOne ? "I" : "II") +
                     " has no gift in game " + std::string(to_string(instance.kind)));
  }
  if (dropper == Player::kOne) return path.at(*drop);
  return agent_position(instance, frame, path, *drop);
}

std::optional<Rational> first_root(const Rational& offset, int f_coef, const PathPlan& f,
                                   int g_coef, const PathPlan& g, const Rational& from,
                                   const Rational& until) {
  if (until < from) return std::nullopt;
  auto h = [&](const Rational& t) {
    Rational v = offset;
    if (f_coef != 0) v += f.at(t) * f_coef;
    if (g_coef != 0) v += g.at(t) * g_coef;
    return v;
  };
  std::vector<Rational> times{from, until};
  auto add = [&](const PathPlan& p) {
    for (const auto& b : p.breakpoints()) {
      if (from < b && b < until) times.push_back(b);
    }
  };
  if (f_coef != 0) add(f);
  if (g_coef != 0) add(g);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Rational prev = h(times.front());
  if (prev.is_zero()) return times.front();
  for (std::size_t i = 1; i < times.size(); ++i) {
    Rational cur = h(times[i]);
    if (cur.is_zero()) return times[i];
    if (prev.sign() != cur.sign()) {
      // linear on [times[i-1], times[i]]
      return times[i - 1] + (times[i] - times[i - 1]) * prev / (prev - cur);
    }
    prev = cur;
  }
  return std::nullopt;
}

std::optional<Rational> scenario_end_time(const GameInstance& instance,
                                          const ScenarioFrame& frame, const PathPlan& f,
                                          const PathPlan& g) {
  const Rational zero(0);
  const Rational& horizon = instance.horizon;
  const Rational base = instance.distance * frame.sigma;

  std::optional<Rational> meet = first_root(base, -1, f, frame.epsilon, g, zero, horizon);

  std::optional<Rational> one_finds;  // I reaches Player II's gift
  if (instance.drop_two) {
    Rational p = gift_position(instance, Player::kTwo, frame, g);
    one_finds = first_root(p, -1, f, 0, g, *instance.drop_two, horizon);
  }
  std::optional<Rational> two_finds;  // the agent reaches Player I's gift
  if (instance.drop_one) {
    Rational q = gift_position(instance, Player::kOne, frame, f);
    two_finds = first_root(base - q, 0, f, frame.epsilon, g, *instance.drop_one, horizon);
  }

  std::optional<Rational> gift_end;
  switch (instance.kind) {
    case GameKind::kNoGift:
      break;
    case GameKind::kOneGift:
      gift_end = one_finds;
      break;
    case GameKind::kTwoGiftsOr:
      if (one_finds && two_finds) {
        gift_end = min(*one_finds, *two_finds);
      } else {
        gift_end = one_finds ? one_finds : two_finds;
      }
      break;
    case GameKind::kTwoGiftsAnd:
      if (one_finds && two_finds) gift_end = max(*one_finds, *two_finds);
      break;
  }
  if (meet && gift_end) return min(*meet, *gift_end);
  return meet ? meet : gift_end;
}

}  // namespace rdv
