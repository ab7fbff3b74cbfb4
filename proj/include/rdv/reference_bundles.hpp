#pragma once

#include "rdv/line_model.hpp"

namespace rdv {

// Known optimal bundles, all scaled linearly from D = 16.

// No gifts: f = [D], g = [D/2, D, 2D]; value 13D/8.
StrategyBundle no_gift_bundle(const Rational& distance);

// Player II drops at D/4: f = [3D/4], g = [D/4; D/4, 3D/2]; value 21D/16.
StrategyBundle one_gift_bundle(const Rational& distance);

// Either gift ends the game, both dropped at D/2: f = g = [D/2; D/2];
// value 5D/4.
StrategyBundle or_gifts_bundle(const Rational& distance);

// Both gifts needed; value 3D/2 for each of the three drop pairs below.
// Drops (0, 0).
StrategyBundle and_gifts_bundle_early(const Rational& distance);
// Player II drops at D/4; Player I's drop time does not matter.
StrategyBundle and_gifts_bundle_quarter(const Rational& distance);
// Drops (D/2, D/2).
StrategyBundle and_gifts_bundle_half(const Rational& distance);

}  // namespace rdv
