#include "rdv/serialization.hpp"

#include <fstream>
#include <sstream>

#include "rdv/errors.hpp"

namespace rdv {

Json rational_to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad rational: ") + e.what());
  }
  throw ConfigError("expected a rational as \"p/q\" or an integer, got " + j.dump());
}

Json node_to_json(const DecisionNode& node) {
  Json j;
  j["t"] = rational_to_json(node.time);
  j["obs"] = std::string(to_string(node.key));
  j["x"] = rational_to_json(node.position);
  j["dir"] = node.direction;
  if (!node.scenarios.empty()) j["scenarios"] = node.scenarios;
  j["children"] = Json::array();
  for (const auto& c : node.children) j["children"].push_back(node_to_json(c));
  return j;
}

DecisionNode node_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("decision node must be an object");
  DecisionNode n;
  try {
    n.time = rational_from_json(j.at("t"));
    n.key = parse_node_key(j.at("obs").get<std::string>());
    n.position = rational_from_json(j.at("x"));
    n.direction = j.at("dir").get<int>();
    if (j.contains("scenarios")) n.scenarios = j.at("scenarios").get<std::vector<int>>();
    if (j.contains("children")) {
      for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad decision node: ") + e.what());
  } catch (const ModelError& e) {
    throw ConfigError(std::string("bad decision node: ") + e.what());
  }
  if (n.direction != 1 && n.direction != -1) {
    throw ConfigError("decision node direction must be +1 or -1");
  }
  return n;
}

Json bundle_to_json(const StrategyBundle& bundle) {
  Json j;
  j["player_one"] = node_to_json(bundle.player_one);
  j["player_two"] = node_to_json(bundle.player_two);
  return j;
}

StrategyBundle bundle_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("player_one") || !j.contains("player_two")) {
    throw ConfigError("bundle needs player_one and player_two");
  }
  return {node_from_json(j.at("player_one")), node_from_json(j.at("player_two"))};
}

Json outcome_to_json(const Outcome& outcome) {
  Json j;
  Json ends = Json::array();
  for (const auto& t : outcome.end_times) ends.push_back(t ? rational_to_json(*t) : Json());
  j["end_times"] = ends;
  Json ordered = Json::array();
  for (const auto& t : outcome.ordered_times) ordered.push_back(rational_to_json(t));
  j["ordered_times"] = ordered;
  j["value"] = outcome.value ? rational_to_json(*outcome.value) : Json();
  if (outcome.value) j["value_decimal15"] = outcome.value->decimal(15);
  return j;
}

Json instance_to_json(const GameInstance& instance) {
  Json j;
  j["game"] = std::string(to_string(instance.kind));
  j["D"] = rational_to_json(instance.distance);
  j["tau1"] = instance.drop_one ? rational_to_json(*instance.drop_one) : Json();
  j["tau2"] = instance.drop_two ? rational_to_json(*instance.drop_two) : Json();
  j["T"] = rational_to_json(instance.horizon);
  return j;
}

std::string bundle_key(const StrategyBundle& bundle) { return bundle_to_json(bundle).dump(); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace rdv
