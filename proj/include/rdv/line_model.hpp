#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdv/rational.hpp"

namespace rdv {

// G, G1, G2-or and G2-and.
enum class GameKind { kNoGift, kOneGift, kTwoGiftsOr, kTwoGiftsAnd };

std::string_view to_string(GameKind kind);
// Accepts the CLI spellings "g", "g1", "g2or", "g2and".
GameKind parse_game_kind(std::string_view text);

inline bool player_one_drops(GameKind kind) {
  return kind == GameKind::kTwoGiftsOr || kind == GameKind::kTwoGiftsAnd;
}
inline bool player_two_drops(GameKind kind) { return kind != GameKind::kNoGift; }

enum class Player { kOne, kTwo };

// Nature's placement of Player II relative to Player I. The agent of
// scenario `id` is at sigma*D + epsilon*g(t), where g is Player II's path in
// that player's own forward frame.
struct ScenarioFrame {
  int id;
  int sigma;
  int epsilon;
};

inline constexpr std::array<ScenarioFrame, 4> kScenarios = {{
    {1, +1, -1},
    {2, -1, -1},
    {3, -1, +1},
    {4, +1, +1},
}};

const ScenarioFrame& scenario_frame(int id);

struct GameInstance {
  GameKind kind = GameKind::kNoGift;
  Rational distance;
  std::optional<Rational> drop_one;  // Player I
  std::optional<Rational> drop_two;  // Player II
  Rational horizon;

  // Validating constructor. The horizon defaults to 4*D.
  static GameInstance make(GameKind kind, const Rational& distance,
                           std::optional<Rational> drop_one = std::nullopt,
                           std::optional<Rational> drop_two = std::nullopt,
                           std::optional<Rational> horizon = std::nullopt);

  const std::optional<Rational>& drop_of(Player p) const {
    return p == Player::kOne ? drop_one : drop_two;
  }
};

// Lipschitz-1 path starting at (0, 0), given by waypoints; after the last
// waypoint the path continues at unit speed in terminal_direction.
class PathPlan {
 public:
  struct Waypoint {
    Rational time;
    Rational position;
    friend bool operator==(const Waypoint&, const Waypoint&) = default;
  };

  PathPlan() = default;
  PathPlan(std::vector<Waypoint> waypoints, int terminal_direction);

  // Bang-bang path in turning-point notation: starts forward and reverses at
  // each listed time.
  static PathPlan from_turning_points(const std::vector<Rational>& turns);

  Rational at(const Rational& t) const;
  // Times at which the slope may change (the waypoint times after 0).
  std::vector<Rational> breakpoints() const;

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  int terminal_direction() const { return terminal_direction_; }

  // Drops waypoints that sit in the middle of a straight stretch.
  PathPlan simplified() const;

  friend bool operator==(const PathPlan& a, const PathPlan& b);

 private:
  std::vector<Waypoint> waypoints_{{Rational(0), Rational(0)}};
  int terminal_direction_ = +1;
};

enum class ObservationKind { kMetAgent, kFoundGift, kAbsence, kDropExecuted };
std::string_view to_string(ObservationKind kind);

struct Observation {
  Rational time;
  ObservationKind kind;
  Rational location;  // in the observer's own frame
  friend bool operator==(const Observation&, const Observation&) = default;
};

// What a decision-tree child is conditioned on. kRoot only labels the root;
// kNone matches whatever no sibling matched.
enum class NodeKey { kRoot, kNone, kMet, kFound, kAbsent, kDrop };
std::string_view to_string(NodeKey key);
NodeKey parse_node_key(std::string_view text);

// One node of a player's adaptive strategy. From (time, position) the player
// moves at unit speed in `direction` until the children's common time, where
// the child matching the player's observation (or the kNone child) takes over. A
// non-empty `scenarios` list restricts the node to those scenarios; such
// nature-aware nodes are only legal when check_consistency accepts them.
struct DecisionNode {
  Rational time;
  NodeKey key = NodeKey::kRoot;
  Rational position;
  int direction = +1;
  std::vector<int> scenarios;
  std::vector<DecisionNode> children;

  friend bool operator==(const DecisionNode&, const DecisionNode&) = default;
};

// Non-adaptive strategy as a chain of kNone nodes, one per turning point.
DecisionNode plan_from_turning_points(const std::vector<Rational>& turns);

// Removes kNone nodes that neither turn nor branch. Semantics are unchanged.
DecisionNode canonicalize(const DecisionNode& root);

struct StrategyBundle {
  DecisionNode player_one;
  DecisionNode player_two;
  friend bool operator==(const StrategyBundle&, const StrategyBundle&) = default;
};

StrategyBundle canonicalize(const StrategyBundle& bundle);

struct Outcome {
  std::array<std::optional<Rational>, 4> end_times;  // scenario order 1..4
  std::vector<Rational> ordered_times;                // resolved times, ascending
  std::optional<Rational> value;                      // mean, when all resolved
};

Outcome make_outcome(const std::array<std::optional<Rational>, 4>& end_times);

// sigma*D + epsilon*g(t). Throws ModelError when t is outside [0, T].
Rational agent_position(const GameInstance& instance, const ScenarioFrame& frame,
                        const PathPlan& g, const Rational& t);

// Where `dropper`'s gift lies (absolute coordinates). For Player I the frame
// is ignored and `path` is f; for Player II `path` is g in Player II's own frame.
Rational gift_position(const GameInstance& instance, Player dropper, const ScenarioFrame& frame,
                       const PathPlan& path);

// First time in [0, T] at which the scenario ends under the game's ending
// rule, or nullopt.
std::optional<Rational> scenario_end_time(const GameInstance& instance,
                                          const ScenarioFrame& frame, const PathPlan& f,
                                          const PathPlan& g);

// First t in [from, until] with offset + f_coef*f(t) + g_coef*g(t) == 0.
std::optional<Rational> first_root(const Rational& offset, int f_coef, const PathPlan& f,
                                   int g_coef, const PathPlan& g, const Rational& from,
                                   const Rational& until);

}  // namespace rdv
