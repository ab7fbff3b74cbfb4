#include "rdv/evaluator.hpp"

#include <algorithm>

#include "rdv/errors.hpp"

namespace rdv {

namespace {

void validate_tree(const DecisionNode& node, bool is_root) {
  if (node.direction != 1 && node.direction != -1) {
    throw ModelError("node at t=" + node.time.str() + " has direction other than +1/-1");
  }
  if (is_root) {
    if (node.key != NodeKey::kRoot || !node.time.is_zero() || !node.position.is_zero()) {
      throw ModelError("strategy root must be {t: 0, obs: ROOT, x: 0}");
    }
  } else if (node.key == NodeKey::kRoot) {
    throw ModelError("ROOT key below the root (t=" + node.time.str() + ")");
  }
  for (int s : node.scenarios) {
    if (s < 1 || s > 4) throw ModelError("scenario mask entries must be 1..4");
  }
  for (const auto& c : node.children) {
    if (c.time <= node.time) {
      throw ModelError("child at t=" + c.time.str() + " does not follow its parent at t=" +
                       node.time.str());
    }
    if (c.time != node.children.front().time) {
      throw ModelError("children of the node at t=" + node.time.str() +
                       " must share one decision time");
    }
    validate_tree(c, false);
  }
}

int rank(ObservationKind k) {
  switch (k) {
    case ObservationKind::kMetAgent: return 0;
    case ObservationKind::kFoundGift: return 1;
    case ObservationKind::kAbsence: return 2;
    case ObservationKind::kDropExecuted: return 3;
  }
  return 4;
}

NodeKey key_of(ObservationKind k) {
  switch (k) {
    case ObservationKind::kMetAgent: return NodeKey::kMet;
    case ObservationKind::kFoundGift: return NodeKey::kFound;
    case ObservationKind::kAbsence: return NodeKey::kAbsent;
    case ObservationKind::kDropExecuted: return NodeKey::kDrop;
  }
  return NodeKey::kNone;
}

// Chronological co-simulation of both players in all four scenarios.
class Walker {
 public:
  Walker(const GameInstance& instance, const StrategyBundle& bundle) : inst_(instance) {
    validate_tree(bundle.player_one, true);
    validate_tree(bundle.player_two, true);
    for (int s = 0; s < 4; ++s) {
      start(agents_[0][s], bundle.player_one);
      start(agents_[1][s], bundle.player_two);
    }
  }

  Realization run() {
    Rational t(0);
    observe(t);
    const Rational& horizon = inst_.horizon;
    while (true) {
      std::optional<Rational> decision = next_decision_time();
      Rational end = decision && *decision < horizon ? *decision : horizon;
      if (end > t) {
        for (const auto& c : crossings(t, end)) observe(c);
      }
      if (decision && *decision <= horizon) dispatch(*decision);
      t = end;
      if (t == horizon) break;
    }

    Realization out;
    for (int p = 0; p < 2; ++p) {
      for (int s = 0; s < 4; ++s) {
        const Mover& m = agents_[p][s];
        out.paths[p][s] = PathPlan(m.points, m.dir).simplified();
        out.histories[p][s] = m.history;
      }
    }
    return out;
  }

 private:
  struct Mover {
    const DecisionNode* node = nullptr;
    bool exhausted = false;  // no child matched; keeps going straight forever
    Rational seg_time, seg_pos;
    int dir = 1;
    std::vector<PathPlan::Waypoint> points;
    std::vector<Observation> history;

    Rational at(const Rational& t) const { return seg_pos + (t - seg_time) * dir; }
  };

  static void start(Mover& m, const DecisionNode& root) {
    m.node = &root;
    m.seg_time = Rational(0);
    m.seg_pos = Rational(0);
    m.dir = root.direction;
    m.points = {{Rational(0), Rational(0)}};
  }

  const ScenarioFrame& frame(int s) const { return kScenarios[static_cast<std::size_t>(s)]; }

  Rational agent_at(int s, const Rational& t) const {
    return inst_.distance * frame(s).sigma + agents_[1][s].at(t) * frame(s).epsilon;
  }

  std::optional<Rational> next_decision_time() const {
    std::optional<Rational> best;
    for (const auto& row : agents_) {
      for (const auto& m : row) {
        if (m.exhausted || m.node->children.empty()) continue;
        const Rational& c = m.node->children.front().time;
        if (!best || c < *best) best = c;
      }
    }
    return best;
  }

  // Root in (from, to] of a linear function given at both ends.
  static std::optional<Rational> linear_root(const Rational& from, const Rational& h_from,
                                             const Rational& to, const Rational& h_to) {
    if (h_from.is_zero()) return std::nullopt;
    if (h_to.is_zero()) return to;
    if (h_from.sign() == h_to.sign()) return std::nullopt;
    return from + (to - from) * h_from / (h_from - h_to);
  }

  // Every instant in (from, to] at which some observation might occur.
  std::vector<Rational> crossings(const Rational& from, const Rational& to) const {
    std::vector<Rational> out{to};
    auto add_drop = [&](const std::optional<Rational>& drop) {
      if (drop && from < *drop && *drop <= to) out.push_back(*drop);
    };
    add_drop(inst_.drop_one);
    add_drop(inst_.drop_two);

    // Gift positions that exist at some point in (from, to].
    std::array<std::optional<Rational>, 4> gift_two, gift_one;
    for (int s = 0; s < 4; ++s) {
      if (inst_.drop_two && *inst_.drop_two <= to) gift_two[s] = two_gift(s);
      if (inst_.drop_one && *inst_.drop_one <= to) gift_one[s] = one_gift(s);
    }

    for (int s = 0; s < 4; ++s) {
      const Mover& one = agents_[0][s];
      const Mover& two = agents_[1][s];
      auto meet = [&](const Rational& t) { return agent_at(s, t) - one.at(t); };
      if (auto r = linear_root(from, meet(from), to, meet(to))) out.push_back(*r);
      for (int q = 0; q < 4; ++q) {
        if (gift_two[q]) {
          auto h = [&](const Rational& t) { return one.at(t) - *gift_two[q]; };
          auto r = linear_root(from, h(from), to, h(to));
          if (r && *r >= *inst_.drop_two) out.push_back(*r);
        }
        if (gift_one[q]) {
          // Player II's own-frame coordinate of Player I's gift under scenario q.
          Rational own = (*gift_one[q] - inst_.distance * frame(q).sigma) * frame(q).epsilon;
          auto h = [&](const Rational& t) { return two.at(t) - own; };
          auto r = linear_root(from, h(from), to, h(to));
          if (r && *r >= *inst_.drop_one) out.push_back(*r);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Gift positions are frozen when the drop happens; before that they are
  // read off the current segment, which is only valid while the drop time
  // lies inside the interval being scanned.
  Rational two_gift(int s) const {
    return dropped_two_[s] ? *dropped_two_[s] : agent_at(s, *inst_.drop_two);
  }
  Rational one_gift(int s) const {
    return dropped_one_[s] ? *dropped_one_[s] : agents_[0][s].at(*inst_.drop_one);
  }

  // Records what each player perceives at instant t. Histories up to (but not
  // including) t decide which scenarios an observer still considers possible.
  void observe(const Rational& t) {
    std::array<std::array<std::vector<Observation>, 4>, 2> fresh;
    const bool two_dropped = inst_.drop_two && *inst_.drop_two <= t;
    const bool one_dropped = inst_.drop_one && *inst_.drop_one <= t;
    for (int s = 0; s < 4; ++s) {
      if (inst_.drop_two && *inst_.drop_two == t) dropped_two_[s] = agent_at(s, t);
      if (inst_.drop_one && *inst_.drop_one == t) dropped_one_[s] = agents_[0][s].at(t);
    }

    for (int s = 0; s < 4; ++s) {
      const Rational f = agents_[0][s].at(t);
      const Rational g = agents_[1][s].at(t);
      const Rational a = agent_at(s, t);

      if (f == a) {
        fresh[0][s].push_back({t, ObservationKind::kMetAgent, f});
        fresh[1][s].push_back({t, ObservationKind::kMetAgent, g});
      }

      // Player I, absolute frame.
      if (two_dropped) {
        if (two_gift(s) == f) {
          fresh[0][s].push_back({t, ObservationKind::kFoundGift, f});
        } else {
          for (int q = 0; q < 4; ++q) {
            if (q != s && agents_[0][q].history == agents_[0][s].history && two_gift(q) == f) {
              fresh[0][s].push_back({t, ObservationKind::kAbsence, f});
              break;
            }
          }
        }
      }
      if (inst_.drop_one && *inst_.drop_one == t) {
        fresh[0][s].push_back({t, ObservationKind::kDropExecuted, f});
      }

      // Player II, own frame.
      if (one_dropped) {
        if (one_gift(s) == a) {
          fresh[1][s].push_back({t, ObservationKind::kFoundGift, g});
        } else {
          for (int q = 0; q < 4; ++q) {
            if (q == s || agents_[1][q].history != agents_[1][s].history) continue;
            Rational there = inst_.distance * frame(q).sigma + g * frame(q).epsilon;
            if (one_gift(q) == there) {
              fresh[1][s].push_back({t, ObservationKind::kAbsence, g});
              break;
            }
          }
        }
      }
      if (inst_.drop_two && *inst_.drop_two == t) {
        fresh[1][s].push_back({t, ObservationKind::kDropExecuted, g});
      }
    }
    for (int p = 0; p < 2; ++p) {
      for (int s = 0; s < 4; ++s) {
        auto& h = agents_[p][s].history;
        h.insert(h.end(), fresh[p][s].begin(), fresh[p][s].end());
      }
    }
  }

  void dispatch(const Rational& t) {
    for (int p = 0; p < 2; ++p) {
      for (int s = 0; s < 4; ++s) {
        Mover& m = agents_[p][s];
        if (m.exhausted || m.node->children.empty() || m.node->children.front().time != t) {
          continue;
        }
        NodeKey seen = NodeKey::kNone;
        int best = 4;
        for (auto it = m.history.rbegin(); it != m.history.rend() && it->time == t; ++it) {
          if (rank(it->kind) < best) {
            best = rank(it->kind);
            seen = key_of(it->kind);
          }
        }
        const DecisionNode* exact = nullptr;
        const DecisionNode* fallback = nullptr;
        for (const auto& c : m.node->children) {
          if (!c.scenarios.empty() &&
              std::find(c.scenarios.begin(), c.scenarios.end(), s + 1) == c.scenarios.end()) {
            continue;
          }
          if (c.key == seen && !exact) exact = &c;
          if (c.key == NodeKey::kNone && !fallback) fallback = &c;
        }
        const DecisionNode* next = exact ? exact : fallback;
        if (!next) {
          m.exhausted = true;
          continue;
        }
        Rational pos = m.at(t);
        if (next->position != pos) {
          throw ModelError(std::string("Player ") + (p == 0 ? "I" : "II") + " node at t=" +
                           t.str() + " records x=" + next->position.str() +
                           " but the path is at " + pos.str() + " in scenario " +
                           std::to_string(s + 1));
        }
        m.points.push_back({t, pos});
        m.seg_time = t;
        m.seg_pos = pos;
        m.dir = next->direction;
        m.node = next;
      }
    }
  }

  const GameInstance& inst_;
  std::array<std::array<Mover, 4>, 2> agents_;
  std::array<std::optional<Rational>, 4> dropped_one_, dropped_two_;
};

// First instant at which two paths stop agreeing, if ever (within [0, T]).
std::optional<Rational> path_divergence(const PathPlan& a, const PathPlan& b,
                                        const Rational& horizon) {
  std::vector<Rational> times{Rational(0), horizon};
  for (const auto& t : a.breakpoints()) if (t < horizon) times.push_back(t);
  for (const auto& t : b.breakpoints()) if (t < horizon) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (a.at(times[i]) != b.at(times[i])) return times[i - 1];
  }
  return std::nullopt;
}

std::optional<Rational> history_divergence(const std::vector<Observation>& a,
                                           const std::vector<Observation>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] == b[i])) return min(a[i].time, b[i].time);
  }
  if (a.size() > n) return a[n].time;
  if (b.size() > n) return b[n].time;
  return std::nullopt;
}

}  // namespace

Realization realize(const GameInstance& instance, const StrategyBundle& bundle) {
  return Walker(instance, bundle).run();
}

ConsistencyVerdict check_consistency(const GameInstance& instance,
                                     const Realization& realization) {
  ConsistencyVerdict verdict;
  for (Player p : {Player::kOne, Player::kTwo}) {
    for (int a = 1; a <= 4; ++a) {
      for (int b = a + 1; b <= 4; ++b) {
        auto paths_split =
            path_divergence(realization.path(p, a), realization.path(p, b), instance.horizon);
        if (!paths_split) continue;
        auto info_split = history_divergence(realization.history(p, a), realization.history(p, b));
        if (info_split && *info_split <= *paths_split) continue;
        if (verdict.consistent || *paths_split < *verdict.divergence_time) {
          verdict.consistent = false;
          verdict.player = p;
          verdict.scenario_a = a;
          verdict.scenario_b = b;
          verdict.divergence_time = *paths_split;
        }
      }
    }
  }
  if (!verdict.consistent) {
    verdict.message = std::string("Player ") + (verdict.player == Player::kOne ? "I" : "II") +
                      " moves differently in scenarios " + std::to_string(verdict.scenario_a) +
                      " and " + std::to_string(verdict.scenario_b) + " from t=" +
                      verdict.divergence_time->str() +
                      " although that player's observations there still agree";
  }
  return verdict;
}

ConsistencyVerdict check_consistency(const GameInstance& instance, const StrategyBundle& bundle) {
  return check_consistency(instance, realize(instance, bundle));
}

Outcome evaluate_bundle(const GameInstance& instance, const StrategyBundle& bundle) {
  Realization r = realize(instance, bundle);
  ConsistencyVerdict verdict = check_consistency(instance, r);
  if (!verdict.consistent) throw ConsistencyError(verdict.message);
  std::array<std::optional<Rational>, 4> ends;
  for (int s = 1; s <= 4; ++s) {
    ends[static_cast<std::size_t>(s - 1)] = scenario_end_time(
        instance, scenario_frame(s), r.path(Player::kOne, s), r.path(Player::kTwo, s));
  }
  return make_outcome(ends);
}

Outcome evaluate_paths(const GameInstance& instance, const PathPlan& f, const PathPlan& g) {
  std::array<std::optional<Rational>, 4> ends;
  for (int s = 1; s <= 4; ++s) {
    ends[static_cast<std::size_t>(s - 1)] = scenario_end_time(instance, scenario_frame(s), f, g);
  }
  return make_outcome(ends);
}

}  // namespace rdv
