#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rdv/line_model.hpp"

namespace rdv {

// One scenario as the search sees it. Positions are f (absolute) and g
// (Player II's own frame); class ids are the decision-tree node currently
// steering that player in this scenario, so scenarios sharing an id are
// indistinguishable to that player.
struct ScenarioContext {
  bool live = true;
  Rational one_pos;
  Rational two_pos;
  int one_dir = +1;
  int two_dir = +1;
  int one_class = 0;
  int two_class = 0;
  bool one_found = false;  // Player I has found this agent's gift
  bool two_found = false;  // the agent has found Player I's gift
  std::optional<Rational> one_gift;  // absolute position of Player I's gift
  std::optional<Rational> two_gift;  // absolute position of the agent's gift
};

// An information class that may pick a new direction at the current clock.
struct Chooser {
  Player player = Player::kOne;
  int node = 0;
  int parent = -1;
  NodeKey key = NodeKey::kRoot;
  unsigned mask = 0;  // bit s-1 set for each member scenario s
  Rational position;  // in the player's own frame
};

struct SolverState {
  Rational clock;
  std::array<ScenarioContext, 4> scenarios;
  std::array<std::optional<Rational>, 4> end_times;
  Rational resolved_sum;
  std::vector<Chooser> choosers;
  std::array<int, 2> next_node{1, 1};

  bool finished() const;
};

// One direction per chooser, in the order of SolverState::choosers.
using DirectionAssignment = std::vector<int>;

enum class SolveMode { kAllOptima, kOneOptimum, kValueOnly };

struct SolveOptions {
  SolveMode mode = SolveMode::kAllOptima;
  // Fixes Player I's first move to +1 (the reflection f,g -> -f,-g maps the
  // other half onto it).
  bool symmetry_reduction = false;
  // Drops directions in which a class has nothing left to meet or find.
  bool prune_senseless = true;
  std::size_t max_bundles = 10000;
};

struct SolveResult {
  Rational value;
  std::vector<StrategyBundle> optimal_bundles;  // canonical, sorted, deduplicated
  std::uint64_t node_count = 0;
  bool bundles_truncated = false;
};

// State at t = 0 after any drops at time 0; both root classes are choosers.
SolverState initial_state(const GameInstance& instance);

// Earliest future instant at which, under the current directions, a meeting,
// a first gift find, or a pending drop happens in a live scenario.
std::optional<Rational> next_event_time(const GameInstance& instance, const SolverState& state);

// Admissible joint direction choices for the current choosers.
std::vector<DirectionAssignment> direction_branches(const GameInstance& instance,
                                                    const SolverState& state,
                                                    const SolveOptions& options = {});

// Applies an assignment, moves to the next event and processes it. Returns
// nullopt when no event ever happens under those directions.
std::optional<SolverState> advance(const GameInstance& instance, const SolverState& state,
                                   const DirectionAssignment& assignment);

// Sum of resolved end times plus a per-scenario lower bound for each live
// scenario (four times a bound on the value).
Rational lower_bound_sum(const GameInstance& instance, const SolverState& state);

// Exact optimum over information-consistent unit-speed bundles that only
// turn at their own event times (meetings, first gift finds, own drops).
// Throws HorizonError when branches cut at T could still beat the result.
SolveResult solve_fixed_drops(const GameInstance& instance, const SolveOptions& options = {});

}  // namespace rdv
