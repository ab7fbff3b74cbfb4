#include "rdv/solver.hpp"

#include <algorithm>
#include <map>

#include "rdv/errors.hpp"
#include "rdv/serialization.hpp"

namespace rdv {

namespace {

constexpr unsigned bit(int s) { return 1u << s; }

Rational agent_abs(const GameInstance& inst, int s, const ScenarioContext& c) {
  const ScenarioFrame& fr = kScenarios[static_cast<std::size_t>(s)];
  return Rational(fr.sigma) * inst.distance + Rational(fr.epsilon) * c.two_pos;
}

// Smallest dt > 0 with x0 + v*dt == target, if any.
std::optional<Rational> reach(const Rational& x0, int v, const Rational& target) {
  if (v == 0) return std::nullopt;
  Rational dt = (target - x0) / Rational(v);
  if (dt.sign() > 0) return dt;
  return std::nullopt;
}

void keep_min(std::optional<Rational>& best, const std::optional<Rational>& c) {
  if (c && (!best || *c < *best)) best = c;
}

bool ends(GameKind kind, bool met, bool one_found, bool two_found) {
  if (met) return true;
  switch (kind) {
    case GameKind::kNoGift: return false;
    case GameKind::kOneGift: return one_found;
    case GameKind::kTwoGiftsOr: return one_found || two_found;
    case GameKind::kTwoGiftsAnd: return one_found && two_found;
  }
  return false;
}

// Processes everything that happens at state.clock: drops, meetings, finds,
// scenario ends, and the resulting choosers.
void settle(const GameInstance& inst, SolverState& st) {
  const Rational& t = st.clock;
  const bool one_drop_now = inst.drop_one && *inst.drop_one == t;
  const bool two_drop_now = inst.drop_two && *inst.drop_two == t;

  std::array<bool, 4> was_live{};
  std::array<bool, 4> ev_one{}, ev_two{}, at_one{}, at_two{};
  for (int s = 0; s < 4; ++s) {
    ScenarioContext& c = st.scenarios[static_cast<std::size_t>(s)];
    was_live[static_cast<std::size_t>(s)] = c.live;
    if (!c.live) continue;
    const Rational a = agent_abs(inst, s, c);
    if (one_drop_now) c.one_gift = c.one_pos;
    if (two_drop_now) c.two_gift = a;
    const bool met = c.one_pos == a;
    // Physical presence at a gift is what the player observes; only the
    // first find counts as an event.
    const bool one_at = c.two_gift && *c.two_gift == c.one_pos;
    const bool two_at = c.one_gift && *c.one_gift == a;
    const bool one_new = one_at && !c.one_found;
    const bool two_new = two_at && !c.two_found;
    c.one_found = c.one_found || one_at;
    c.two_found = c.two_found || two_at;
    const auto i = static_cast<std::size_t>(s);
    at_one[i] = one_at;
    at_two[i] = two_at;
    ev_one[i] = met || one_new || one_drop_now;
    ev_two[i] = met || two_new || two_drop_now;
    if (ends(inst.kind, met, c.one_found, c.two_found)) {
      c.live = false;
      st.end_times[i] = t;
      st.resolved_sum += t;
    }
  }

  st.choosers.clear();
  for (int p = 0; p < 2; ++p) {
    const Player player = p == 0 ? Player::kOne : Player::kTwo;
    const auto& ev = p == 0 ? ev_one : ev_two;
    const auto& at = p == 0 ? at_one : at_two;
    auto cls = [&](ScenarioContext& c) -> int& { return p == 0 ? c.one_class : c.two_class; };

    std::array<int, 4> old_class{};
    for (int s = 0; s < 4; ++s) old_class[static_cast<std::size_t>(s)] = cls(st.scenarios[static_cast<std::size_t>(s)]);

    std::vector<int> seen;
    for (int s = 0; s < 4; ++s) {
      const auto i = static_cast<std::size_t>(s);
      if (!was_live[i]) continue;
      const int id = old_class[i];
      if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
      seen.push_back(id);

      bool any_event = false;
      unsigned found = 0, none = 0;
      for (int u = 0; u < 4; ++u) {
        const auto j = static_cast<std::size_t>(u);
        if (!was_live[j] || old_class[j] != id) continue;
        any_event = any_event || ev[j];
        if (!st.scenarios[j].live) continue;
        (at[j] ? found : none) |= bit(u);
      }
      if (!any_event) continue;
      for (const auto& [mask, key] : {std::pair{found, NodeKey::kFound},
                                      std::pair{none, NodeKey::kNone}}) {
        if (!mask) continue;
        Chooser ch;
        ch.player = player;
        ch.node = st.next_node[static_cast<std::size_t>(p)]++;
        ch.parent = id;
        ch.key = key;
        ch.mask = mask;
        for (int u = 0; u < 4; ++u) {
          if (!(mask & bit(u))) continue;
          ScenarioContext& c = st.scenarios[static_cast<std::size_t>(u)];
          cls(c) = ch.node;
          ch.position = p == 0 ? c.one_pos : c.two_pos;
        }
        st.choosers.push_back(ch);
      }
    }
  }
}

std::optional<Rational> find_bound(const Rational& t, const std::optional<Rational>& gift,
                                   const std::optional<Rational>& drop, const Rational& seeker,
                                   const Rational& dropper) {
  if (gift) return t + abs(*gift - seeker);
  if (!drop) return std::nullopt;
  return max(*drop, t + abs(dropper - seeker) / Rational(2));
}

Rational scenario_bound(const GameInstance& inst, const SolverState& st, int s) {
  const ScenarioContext& c = st.scenarios[static_cast<std::size_t>(s)];
  const Rational& t = st.clock;
  const Rational a = agent_abs(inst, s, c);
  const Rational meet = t + abs(a - c.one_pos) / Rational(2);
  std::optional<Rational> one_find, two_find;
  if (player_two_drops(inst.kind) && !c.one_found) {
    one_find = find_bound(t, c.two_gift, inst.drop_two, c.one_pos, a);
  }
  if (player_one_drops(inst.kind) && !c.two_found) {
    two_find = find_bound(t, c.one_gift, inst.drop_one, a, c.one_pos);
  }
  std::optional<Rational> best = meet;
  switch (inst.kind) {
    case GameKind::kNoGift: break;
    case GameKind::kOneGift: keep_min(best, one_find); break;
    case GameKind::kTwoGiftsOr:
      keep_min(best, one_find);
      keep_min(best, two_find);
      break;
    case GameKind::kTwoGiftsAnd: {
      // A completed find imposes no further constraint.
      std::optional<Rational> both;
      const bool one_ok = c.one_found || one_find;
      const bool two_ok = c.two_found || two_find;
      if (one_ok && two_ok) {
        both = t;
        if (one_find) both = max(*both, *one_find);
        if (two_find) both = max(*both, *two_find);
      }
      keep_min(best, both);
      break;
    }
  }
  return *best;
}

// Whether moving in `dir` can still lead the class toward something it has to
// meet or find. A pending own drop always keeps both directions open.
bool sensible(const GameInstance& inst, const SolverState& st, const Chooser& ch, int dir) {
  const int p = ch.player == Player::kOne ? 0 : 1;
  const auto& drop = inst.drop_of(ch.player);
  if (drop && *drop > st.clock) return true;
  for (int s = 0; s < 4; ++s) {
    if (!(ch.mask & bit(s))) continue;
    const ScenarioContext& c = st.scenarios[static_cast<std::size_t>(s)];
    if (!c.live) continue;
    const Rational a = agent_abs(inst, s, c);
    std::vector<Rational> targets;
    Rational self;
    int to_own = 1;
    if (p == 0) {
      self = c.one_pos;
      targets.push_back(a);
      if (player_two_drops(inst.kind) && !c.one_found && c.two_gift) targets.push_back(*c.two_gift);
    } else {
      self = a;
      to_own = kScenarios[static_cast<std::size_t>(s)].epsilon;
      targets.push_back(c.one_pos);
      if (player_one_drops(inst.kind) && !c.two_found && c.one_gift) targets.push_back(*c.one_gift);
    }
    for (const auto& x : targets) {
      if (((x - self).sign() * to_own) == dir) return true;
    }
  }
  return false;
}

}  // namespace

bool SolverState::finished() const {
  return std::none_of(scenarios.begin(), scenarios.end(),
                      [](const ScenarioContext& c) { return c.live; });
}

SolverState initial_state(const GameInstance& instance) {
  SolverState st;
  settle(instance, st);
  // Drops at time 0 are known in advance; they do not split the roots.
  st.choosers.clear();
  st.next_node = {1, 1};
  for (auto& c : st.scenarios) {
    c.one_class = 0;
    c.two_class = 0;
  }
  for (int p = 0; p < 2; ++p) {
    Chooser ch;
    ch.player = p == 0 ? Player::kOne : Player::kTwo;
    ch.node = 0;
    ch.parent = -1;
    ch.key = NodeKey::kRoot;
    ch.mask = 0;
    for (int s = 0; s < 4; ++s) {
      if (st.scenarios[static_cast<std::size_t>(s)].live) ch.mask |= bit(s);
    }
    ch.position = Rational(0);
    st.choosers.push_back(ch);
  }
  return st;
}

std::optional<Rational> next_event_time(const GameInstance& instance, const SolverState& st) {
  std::optional<Rational> dt;
  for (int s = 0; s < 4; ++s) {
    const ScenarioContext& c = st.scenarios[static_cast<std::size_t>(s)];
    if (!c.live) continue;
    const int eps = kScenarios[static_cast<std::size_t>(s)].epsilon;
    const Rational a = agent_abs(instance, s, c);
    const int rel = eps * c.two_dir - c.one_dir;
    // gap a - f changes at rate rel.
    keep_min(dt, reach(a - c.one_pos, rel, Rational(0)));
    if (c.two_gift && !c.one_found) keep_min(dt, reach(c.one_pos, c.one_dir, *c.two_gift));
    if (c.one_gift && !c.two_found) keep_min(dt, reach(a, eps * c.two_dir, *c.one_gift));
  }
  if (std::none_of(st.scenarios.begin(), st.scenarios.end(),
                   [](const ScenarioContext& c) { return c.live; })) {
    return std::nullopt;
  }
  for (const auto& d : {instance.drop_one, instance.drop_two}) {
    if (d && *d > st.clock) keep_min(dt, *d - st.clock);
  }
  if (!dt) return std::nullopt;
  return st.clock + *dt;
}

std::vector<DirectionAssignment> direction_branches(const GameInstance& instance,
                                                    const SolverState& st,
                                                    const SolveOptions& options) {
  std::vector<std::vector<int>> per;
  for (const auto& ch : st.choosers) {
    std::vector<int> opts;
    for (int d : {+1, -1}) {
      if (options.symmetry_reduction && ch.key == NodeKey::kRoot && ch.player == Player::kOne &&
          d == -1) {
        continue;
      }
      if (options.prune_senseless && !sensible(instance, st, ch, d)) continue;
      opts.push_back(d);
    }
    if (opts.empty()) opts = {+1};
    per.push_back(std::move(opts));
  }
  std::vector<DirectionAssignment> out{{}};
  for (const auto& opts : per) {
    std::vector<DirectionAssignment> next;
    for (const auto& partial : out) {
      for (int d : opts) {
        auto a = partial;
        a.push_back(d);
        next.push_back(std::move(a));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::optional<SolverState> advance(const GameInstance& instance, const SolverState& state,
                                   const DirectionAssignment& assignment) {
  if (assignment.size() != state.choosers.size()) {
    throw ModelError("direction assignment has " + std::to_string(assignment.size()) +
                     " entries for " + std::to_string(state.choosers.size()) + " choosers");
  }
  SolverState st = state;
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    const Chooser& ch = st.choosers[k];
    for (int s = 0; s < 4; ++s) {
      if (!(ch.mask & bit(s))) continue;
      auto& c = st.scenarios[static_cast<std::size_t>(s)];
      (ch.player == Player::kOne ? c.one_dir : c.two_dir) = assignment[k];
    }
  }
  const auto te = next_event_time(instance, st);
  if (!te) return std::nullopt;
  const Rational dt = *te - st.clock;
  for (auto& c : st.scenarios) {
    if (!c.live) continue;
    c.one_pos += Rational(c.one_dir) * dt;
    c.two_pos += Rational(c.two_dir) * dt;
  }
  st.clock = *te;
  settle(instance, st);
  return st;
}

Rational lower_bound_sum(const GameInstance& instance, const SolverState& state) {
  Rational sum = state.resolved_sum;
  for (int s = 0; s < 4; ++s) {
    if (state.scenarios[static_cast<std::size_t>(s)].live) sum += scenario_bound(instance, state, s);
  }
  return sum;
}

namespace {

struct Decision {
  int player;
  int node;
  int parent;
  Rational time;
  NodeKey key;
  Rational position;
  int direction;
};

DecisionNode build_tree(const std::vector<Decision>& ds, int player) {
  std::map<int, std::vector<const Decision*>> kids;
  const Decision* root = nullptr;
  for (const auto& d : ds) {
    if (d.player != player) continue;
    if (d.parent < 0) {
      root = &d;
    } else {
      kids[d.parent].push_back(&d);
    }
  }
  auto make = [&](auto&& self, const Decision& d) -> DecisionNode {
    DecisionNode n;
    n.time = d.time;
    n.key = d.key;
    n.position = d.position;
    n.direction = d.direction;
    auto it = kids.find(d.node);
    if (it != kids.end()) {
      for (const Decision* c : it->second) n.children.push_back(self(self, *c));
      std::sort(n.children.begin(), n.children.end(),
                [](const DecisionNode& a, const DecisionNode& b) {
                  if (a.key != b.key) return a.key < b.key;
                  return a.direction > b.direction;
                });
    }
    return n;
  };
  return make(make, *root);
}

class Search {
 public:
  Search(const GameInstance& inst, const SolveOptions& opt) : inst_(inst), opt_(opt) {
    best_ = Rational(13, 2) * inst.distance;
  }

  SolveResult run() {
    SolverState st = initial_state(inst_);
    visit(st);
    if (cut_ && *cut_ < best_) {
      throw HorizonError("horizon T=" + inst_.horizon.str() +
                         " cuts branches with lower bound " + (*cut_ / Rational(4)).str() +
                         " below the result " + (best_ / Rational(4)).str());
    }
    SolveResult r;
    r.value = best_ / Rational(4);
    r.node_count = nodes_;
    r.bundles_truncated = truncated_;
    for (auto& [key, b] : bundles_) r.optimal_bundles.push_back(std::move(b));
    return r;
  }

 private:
  bool prune(const Rational& lb) const {
    switch (opt_.mode) {
      case SolveMode::kAllOptima: return lb > best_;
      case SolveMode::kOneOptimum: return found_any_ ? lb >= best_ : lb > best_;
      case SolveMode::kValueOnly: return lb >= best_;
    }
    return false;
  }

  void visit(const SolverState& st) {
    ++nodes_;
    if (st.finished()) {
      leaf(st);
      return;
    }
    for (const auto& assignment : direction_branches(inst_, st, opt_)) {
      const std::size_t mark = trail_.size();
      for (std::size_t k = 0; k < assignment.size(); ++k) {
        const Chooser& ch = st.choosers[k];
        trail_.push_back({ch.player == Player::kOne ? 0 : 1, ch.node, ch.parent, st.clock, ch.key,
                          ch.position, assignment[k]});
      }
      step(st, assignment);
      trail_.resize(mark);
    }
  }

  void step(const SolverState& st, const DirectionAssignment& assignment) {
    SolverState moved = st;
    for (std::size_t k = 0; k < assignment.size(); ++k) {
      const Chooser& ch = moved.choosers[k];
      for (int s = 0; s < 4; ++s) {
        if (!(ch.mask & bit(s))) continue;
        auto& c = moved.scenarios[static_cast<std::size_t>(s)];
        (ch.player == Player::kOne ? c.one_dir : c.two_dir) = assignment[k];
      }
    }
    const auto te = next_event_time(inst_, moved);
    if (!te) return;  // some scenario never ends
    if (*te > inst_.horizon) {
      // Every live scenario ends at or after te.
      Rational lb = moved.resolved_sum;
      for (int s = 0; s < 4; ++s) {
        if (moved.scenarios[static_cast<std::size_t>(s)].live) {
          lb += max(*te, scenario_bound(inst_, moved, s));
        }
      }
      if (!prune(lb) && (!cut_ || lb < *cut_)) cut_ = lb;
      return;
    }
    std::optional<SolverState> next = advance(inst_, st, assignment);
    if (!next) return;
    if (prune(lower_bound_sum(inst_, *next))) return;
    visit(*next);
  }

  void leaf(const SolverState& st) {
    const Rational sum = st.resolved_sum;
    if (sum < best_) {
      best_ = sum;
      bundles_.clear();
      truncated_ = false;
      found_any_ = false;
    } else if (sum > best_ || (opt_.mode != SolveMode::kAllOptima && found_any_)) {
      return;
    }
    found_any_ = true;
    if (opt_.mode == SolveMode::kValueOnly) return;
    StrategyBundle b = canonicalize(StrategyBundle{build_tree(trail_, 0), build_tree(trail_, 1)});
    std::string key = bundle_key(b);
    if (bundles_.count(key)) return;
    if (bundles_.size() >= opt_.max_bundles) {
      truncated_ = true;
      return;
    }
    bundles_.emplace(std::move(key), std::move(b));
  }

  const GameInstance& inst_;
  const SolveOptions& opt_;
  Rational best_;
  bool found_any_ = false;
  bool truncated_ = false;
  std::optional<Rational> cut_;
  std::uint64_t nodes_ = 0;
  std::vector<Decision> trail_;
  std::map<std::string, StrategyBundle> bundles_;
};

}  // namespace

SolveResult solve_fixed_drops(const GameInstance& instance, const SolveOptions& options) {
  return Search(instance, options).run();
}

}  // namespace rdv
