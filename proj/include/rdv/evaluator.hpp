#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rdv/line_model.hpp"

namespace rdv {

// Per-scenario paths and observation histories produced by playing a
// bundle's decision trees against all four scenarios at once, up to T.
struct Realization {
  // [player][scenario-1]; Player I paths are absolute, Player II paths are in
  // that player's own frame.
  std::array<std::array<PathPlan, 4>, 2> paths;
  std::array<std::array<std::vector<Observation>, 4>, 2> histories;

  const PathPlan& path(Player p, int scenario) const {
    return paths[p == Player::kOne ? 0 : 1][static_cast<std::size_t>(scenario - 1)];
  }
  const std::vector<Observation>& history(Player p, int scenario) const {
    return histories[p == Player::kOne ? 0 : 1][static_cast<std::size_t>(scenario - 1)];
  }
};

// Throws ModelError for malformed trees (bad root, children at mixed times,
// a node whose recorded position disagrees with the path).
Realization realize(const GameInstance& instance, const StrategyBundle& bundle);

struct ConsistencyVerdict {
  bool consistent = true;
  Player player = Player::kOne;
  int scenario_a = 0;
  int scenario_b = 0;
  std::optional<Rational> divergence_time;
  std::string message;
};

// Accepts iff, for each player, two scenarios whose observation histories
// agree up to t also have paths that agree up to t. Reports the earliest
// violation.
ConsistencyVerdict check_consistency(const GameInstance& instance, const StrategyBundle& bundle);
ConsistencyVerdict check_consistency(const GameInstance& instance, const Realization& realization);

// Four scenario end times and their mean. Throws ConsistencyError for an
// inconsistent bundle.
Outcome evaluate_bundle(const GameInstance& instance, const StrategyBundle& bundle);

// The same non-adaptive pair of paths used in every scenario.
Outcome evaluate_paths(const GameInstance& instance, const PathPlan& f, const PathPlan& g);

}  // namespace rdv
