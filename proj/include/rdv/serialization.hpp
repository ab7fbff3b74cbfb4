#pragma once

#include <string>

#include <json.hpp>

#include "rdv/line_model.hpp"

namespace rdv {

using Json = nlohmann::ordered_json;

// Rationals travel as "p/q" strings; plain integers and decimals are
// accepted on input.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json node_to_json(const DecisionNode& node);
DecisionNode node_from_json(const Json& j);

// {"player_one": <node>, "player_two": <node>}
Json bundle_to_json(const StrategyBundle& bundle);
StrategyBundle bundle_from_json(const Json& j);

Json outcome_to_json(const Outcome& outcome);
Json instance_to_json(const GameInstance& instance);

// Compact dump; used as the total order on bundles.
std::string bundle_key(const StrategyBundle& bundle);

// Reads a whole file as JSON. Throws ConfigError on I/O or parse failure.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace rdv
