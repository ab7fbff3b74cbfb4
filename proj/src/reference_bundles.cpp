#include "rdv/reference_bundles.hpp"

namespace rdv {

namespace {

std::vector<Rational> scaled(const Rational& distance, std::initializer_list<std::int64_t> at16) {
  std::vector<Rational> out;
  for (auto v : at16) out.push_back(Rational(v) * distance / Rational(16));
  return out;
}

DecisionNode node(const Rational& t, NodeKey key, const Rational& x, int dir,
                  std::vector<DecisionNode> children = {}) {
  DecisionNode n;
  n.time = t;
  n.key = key;
  n.position = x;
  n.direction = dir;
  n.children = std::move(children);
  return n;
}

// Forward until 16k, then keep going if a gift is underfoot, else turn.
DecisionNode turn_unless_found(const Rational& k, const Rational& at) {
  return node(0, NodeKey::kRoot, 0, +1,
              {node(at * k, NodeKey::kFound, at * k, +1),
               node(at * k, NodeKey::kNone, at * k, -1)});
}

}  // namespace

StrategyBundle no_gift_bundle(const Rational& distance) {
  return {plan_from_turning_points(scaled(distance, {16})),
          plan_from_turning_points(scaled(distance, {8, 16, 32}))};
}

StrategyBundle one_gift_bundle(const Rational& distance) {
  return {plan_from_turning_points(scaled(distance, {12})),
          plan_from_turning_points(scaled(distance, {4, 24}))};
}

StrategyBundle or_gifts_bundle(const Rational& distance) {
  return {plan_from_turning_points(scaled(distance, {8})),
          plan_from_turning_points(scaled(distance, {8}))};
}

StrategyBundle and_gifts_bundle_early(const Rational& distance) {
  const Rational k = distance / Rational(16);
  return {turn_unless_found(k, 16), turn_unless_found(k, 16)};
}

StrategyBundle and_gifts_bundle_quarter(const Rational& distance) {
  const Rational k = distance / Rational(16);
  return {turn_unless_found(k, 12), plan_from_turning_points(scaled(distance, {4, 12, 28}))};
}

StrategyBundle and_gifts_bundle_half(const Rational& distance) {
  const Rational k = distance / Rational(16);
  auto tree = [&] {
    return node(0, NodeKey::kRoot, 0, +1,
                {node(8 * k, NodeKey::kNone, 8 * k, -1,
                      {node(24 * k, NodeKey::kFound, -8 * k, -1),
                       node(24 * k, NodeKey::kNone, -8 * k, +1)})});
  };
  return {tree(), tree()};
}

}  // namespace rdv
