#pragma once

// Generators and bundle transforms shared by the property tests and the
// acceptance runner.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "rdv/evaluator.hpp"
#include "rdv/line_model.hpp"
#include "rdv/solver.hpp"

namespace support {

using rdv::DecisionNode;
using rdv::GameInstance;
using rdv::GameKind;
using rdv::Rational;
using rdv::StrategyBundle;

inline Rational r(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
  }
  bool coin() { return below(2) == 1; }

  // Random rational in [lo, hi] with a small denominator.
  Rational in(const Rational& lo, const Rational& hi) {
    static constexpr std::int64_t dens[] = {1, 2, 3, 4, 5, 8, 16, 64};
    const std::int64_t den = dens[below(8)];
    const Rational span = hi - lo;
    const std::int64_t steps = (span * Rational(den)).num() / (span * Rational(den)).den();
    return lo + Rational(below(steps + 1), den);
  }

  // Increasing turn times in (0, limit].
  std::vector<Rational> turns(int max_count, const Rational& limit) {
    std::vector<Rational> t;
    Rational last(0);
    const int n = static_cast<int>(below(max_count + 1));
    for (int k = 0; k < n; ++k) {
      Rational next = last + in(r(1, 8), r(12));
      if (next > limit) break;
      t.push_back(next);
      last = next;
    }
    return t;
  }
};

inline oracle::Path oracle_path(int start_dir, const std::vector<Rational>& turns) {
  oracle::Path p;
  p.start_dir = start_dir;
  for (const auto& t : turns) p.turns.push_back(oracle::q(t));
  return p;
}

inline DecisionNode mirrored(const DecisionNode& n) {
  DecisionNode m = n;
  m.position = -n.position;
  m.direction = -n.direction;
  m.children.clear();
  for (const auto& c : n.children) m.children.push_back(mirrored(c));
  return m;
}

// Same plan in library form, starting in `start_dir`.
inline DecisionNode library_plan(int start_dir, const std::vector<Rational>& turns) {
  DecisionNode p = rdv::plan_from_turning_points(turns);
  return start_dir > 0 ? p : mirrored(p);
}

inline rdv::PathPlan library_path(int start_dir, const std::vector<Rational>& turns) {
  rdv::PathPlan p = rdv::PathPlan::from_turning_points(turns);
  if (start_dir > 0) return p;
  std::vector<rdv::PathPlan::Waypoint> w;
  for (const auto& x : p.waypoints()) w.push_back({x.time, -x.position});
  return rdv::PathPlan(w, -p.terminal_direction());
}

inline DecisionNode scaled(const DecisionNode& n, const Rational& k) {
  DecisionNode m = n;
  m.time = n.time * k;
  m.position = n.position * k;
  m.children.clear();
  for (const auto& c : n.children) m.children.push_back(scaled(c, k));
  return m;
}

inline StrategyBundle scaled(const StrategyBundle& b, const Rational& k) {
  return {scaled(b.player_one, k), scaled(b.player_two, k)};
}

inline StrategyBundle mirrored(const StrategyBundle& b) {
  return {mirrored(b.player_one), mirrored(b.player_two)};
}

inline GameInstance scaled(const GameInstance& g, const Rational& k) {
  auto opt = [&](const std::optional<Rational>& x) -> std::optional<Rational> {
    if (!x) return std::nullopt;
    return *x * k;
  };
  return GameInstance::make(g.kind, g.distance * k, opt(g.drop_one), opt(g.drop_two),
                            g.horizon * k);
}

// Reflecting the line (f, g) -> (-f, -g) flips sigma and keeps epsilon:
// scenarios 1<->2 and 3<->4.
inline int reflected_scenario(int s) { return s == 1 ? 2 : s == 2 ? 1 : s == 3 ? 4 : 3; }

// Drop times valid for the kind, sampled from [0, hi].
inline GameInstance random_instance(Gen& gen, GameKind kind, const Rational& d,
                                    const Rational& hi) {
  std::optional<Rational> one, two;
  if (rdv::player_one_drops(kind)) one = gen.in(Rational(0), hi);
  if (rdv::player_two_drops(kind)) two = gen.in(Rational(0), hi);
  return GameInstance::make(kind, d, one, two);
}

// True when both bundles produce the same play in every scenario up to its
// end: same end times and the same positions of both players at every
// breakpoint before the end.
inline bool same_play(const GameInstance& inst, const StrategyBundle& a, const StrategyBundle& b) {
  const rdv::Outcome oa = rdv::evaluate_bundle(inst, a), ob = rdv::evaluate_bundle(inst, b);
  if (oa.end_times != ob.end_times) return false;
  const rdv::Realization ra = rdv::realize(inst, a), rb = rdv::realize(inst, b);
  for (int s = 1; s <= 4; ++s) {
    const Rational end = oa.end_times[s - 1] ? *oa.end_times[s - 1] : inst.horizon;
    for (rdv::Player p : {rdv::Player::kOne, rdv::Player::kTwo}) {
      const rdv::PathPlan& pa = ra.path(p, s);
      const rdv::PathPlan& pb = rb.path(p, s);
      std::vector<Rational> ts = pa.breakpoints();
      for (const auto& t : pb.breakpoints()) ts.push_back(t);
      ts.push_back(end);
      for (const auto& t : ts) {
        if (t <= end && pa.at(t) != pb.at(t)) return false;
      }
    }
  }
  return true;
}

// A bundle whose chosen player changes direction in some scenarios but not
// in others at a time before anything can be observed, so those scenarios
// are still indistinguishable to that player. `seed` picks player, time, split and
// the base paths.
struct Inconsistent {
  GameInstance instance;
  StrategyBundle bundle;
  Rational split;
  std::string what;
};

inline Inconsistent inconsistent_bundle(std::uint64_t seed) {
  Gen gen(seed);
  static constexpr GameKind kinds[] = {GameKind::kNoGift, GameKind::kOneGift,
                                       GameKind::kTwoGiftsOr, GameKind::kTwoGiftsAnd};
  const GameKind kind = kinds[gen.below(4)];
  const Rational d(16);
  // Drops and the split both happen before t = 8, the earliest possible
  // meeting; nothing before a gift is dropped can tell scenarios apart, and
  // the drop itself looks the same in all four.
  std::optional<Rational> one, two;
  const Rational split = gen.in(r(1, 4), r(7, 2));
  if (rdv::player_one_drops(kind)) one = split + gen.in(r(1, 8), r(1));
  if (rdv::player_two_drops(kind)) two = split + gen.in(r(1, 8), r(1));
  const GameInstance inst = GameInstance::make(kind, d, one, two);

  const bool first = gen.coin();
  const int dir = gen.coin() ? +1 : -1;
  DecisionNode mover;
  mover.direction = dir;
  // Pick a proper non-empty subset of scenarios that turn around.
  unsigned mask = 0;
  while (mask == 0 || mask == 15u) mask = static_cast<unsigned>(gen.below(16));
  DecisionNode turn, keep;
  turn.time = keep.time = split;
  turn.position = keep.position = split * Rational(dir);
  turn.key = keep.key = rdv::NodeKey::kNone;
  turn.direction = -dir;
  keep.direction = dir;
  for (int s = 1; s <= 4; ++s) ((mask >> (s - 1)) & 1u ? turn : keep).scenarios.push_back(s);
  mover.children = {keep, turn};

  DecisionNode other = library_plan(gen.coin() ? +1 : -1, {});
  StrategyBundle b = first ? StrategyBundle{mover, other} : StrategyBundle{other, mover};
  return {inst, b, split,
          std::string(first ? "I" : "II") + " splits at " + split.str() + " in " +
              std::string(rdv::to_string(kind))};
}

}  // namespace support
