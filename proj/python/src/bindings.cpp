#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rdv/errors.hpp"
#include "rdv/evaluator.hpp"
#include "rdv/mesh_bounds.hpp"
#include "rdv/reference_bundles.hpp"
#include "rdv/repro.hpp"
#include "rdv/serialization.hpp"
#include "rdv/solver.hpp"

namespace py = pybind11;
using namespace rdv;

namespace {

// Numbers cross the boundary as strings ("p/q", integers or decimals); the
// Python layer converts Fractions and ints.
std::optional<Rational> opt(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return Rational::parse(*s);
}

GameInstance instance(const std::string& game, const std::string& distance,
                      const std::optional<std::string>& drop1,
                      const std::optional<std::string>& drop2,
                      const std::optional<std::string>& horizon) {
  return GameInstance::make(parse_game_kind(game), Rational::parse(distance), opt(drop1), opt(drop2),
                            opt(horizon));
}

std::string solve(const std::string& game, const std::string& distance,
                  const std::optional<std::string>& drop1, const std::optional<std::string>& drop2,
                  const std::optional<std::string>& horizon, const std::string& mode,
                  bool symmetry, bool prune_senseless, std::size_t max_bundles) {
  const GameInstance inst = instance(game, distance, drop1, drop2, horizon);
  SolveOptions o;
  if (mode == "all") {
    o.mode = SolveMode::kAllOptima;
  } else if (mode == "one") {
    o.mode = SolveMode::kOneOptimum;
  } else if (mode == "value") {
    o.mode = SolveMode::kValueOnly;
  } else {
    throw ConfigError("mode must be all, one or value");
  }
  o.symmetry_reduction = symmetry;
  o.prune_senseless = prune_senseless;
  o.max_bundles = max_bundles;
  SolveResult r;
  {
    py::gil_scoped_release release;
    r = solve_fixed_drops(inst, o);
  }
  Json j;
  j["instance"] = instance_to_json(inst);
  j["value"] = rational_to_json(r.value);
  j["node_count"] = r.node_count;
  j["bundles_truncated"] = r.bundles_truncated;
  j["optimal_bundles"] = Json::array();
  for (const auto& b : r.optimal_bundles) j["optimal_bundles"].push_back(bundle_to_json(b));
  return j.dump();
}

std::string evaluate(const std::string& game, const std::string& distance,
                     const std::string& bundle_json, const std::optional<std::string>& drop1,
                     const std::optional<std::string>& drop2,
                     const std::optional<std::string>& horizon) {
  const GameInstance inst = instance(game, distance, drop1, drop2, horizon);
  return outcome_to_json(evaluate_bundle(inst, bundle_from_json(Json::parse(bundle_json)))).dump();
}

std::string consistency(const std::string& game, const std::string& distance,
                        const std::string& bundle_json, const std::optional<std::string>& drop1,
                        const std::optional<std::string>& drop2) {
  const GameInstance inst = instance(game, distance, drop1, drop2, std::nullopt);
  const ConsistencyVerdict v = check_consistency(inst, bundle_from_json(Json::parse(bundle_json)));
  Json j;
  j["consistent"] = v.consistent;
  if (!v.consistent) {
    j["player"] = v.player == Player::kOne ? "I" : "II";
    j["scenarios"] = Json::array({v.scenario_a, v.scenario_b});
    j["divergence_time"] = v.divergence_time ? rational_to_json(*v.divergence_time) : Json();
    j["message"] = v.message;
  }
  return j.dump();
}

std::string mesh(const std::string& game, const std::string& distance, const std::string& lo,
                 const std::string& hi, const std::string& step, unsigned workers) {
  const MeshGrid grid = make_grid(parse_game_kind(game), Rational::parse(distance),
                                  Rational::parse(lo), Rational::parse(hi), Rational::parse(step));
  SweepOptions o;
  o.workers = workers;
  py::gil_scoped_release release;
  if (player_one_drops(grid.kind)) return mesh_csv(sweep_2d(grid, o));
  return mesh_csv(sweep_1d(grid, o));
}

std::string bracket(const std::string& game, const std::string& distance, const std::string& lo,
                    const std::string& hi, const std::string& step, bool guard, unsigned workers) {
  const MeshGrid grid = make_grid(parse_game_kind(game), Rational::parse(distance),
                                  Rational::parse(lo), Rational::parse(hi), Rational::parse(step));
  SweepOptions o;
  o.workers = workers;
  py::gil_scoped_release release;
  Json j;
  if (player_one_drops(grid.kind)) {
    const Mesh2D m = sweep_2d(grid, o);
    j = bracket_to_json(bracket_2d(m, guard));
    j["violations"] = audit_to_json(lipschitz_audit(m));
  } else {
    const Mesh1D m = sweep_1d(grid, o);
    j = bracket_to_json(bracket_1d(m));
    j["violations"] = audit_to_json(lipschitz_audit(m));
  }
  return j.dump();
}

std::string reference_bundle(const std::string& name, const std::string& distance) {
  const Rational d = Rational::parse(distance);
  StrategyBundle b;
  if (name == "no_gift") {
    b = no_gift_bundle(d);
  } else if (name == "one_gift") {
    b = one_gift_bundle(d);
  } else if (name == "or_gifts") {
    b = or_gifts_bundle(d);
  } else if (name == "and_gifts_early") {
    b = and_gifts_bundle_early(d);
  } else if (name == "and_gifts_quarter") {
    b = and_gifts_bundle_quarter(d);
  } else if (name == "and_gifts_half") {
    b = and_gifts_bundle_half(d);
  } else {
    throw ConfigError("unknown reference bundle '" + name + "'");
  }
  return bundle_to_json(b).dump();
}

py::dict repro(const std::string& which, unsigned workers) {
  ReproOutput out;
  {
    py::gil_scoped_release release;
    out = run_repro(which, workers);
  }
  py::dict d;
  d["files"] = out.files;
  d["text"] = out.text;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact rendezvous values on the line (compiled core)";

  auto base = py::register_exception<Error>(m, "RendezvousError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto model = py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", model.ptr());
  py::register_exception<HorizonError>(m, "HorizonError", base.ptr());

  m.def("solve", &solve, py::arg("game"), py::arg("distance"), py::arg("drop1") = py::none(),
        py::arg("drop2") = py::none(), py::arg("horizon") = py::none(), py::arg("mode") = "all",
        py::arg("symmetry") = false, py::arg("prune_senseless") = true,
        py::arg("max_bundles") = 10000);
  m.def("evaluate", &evaluate, py::arg("game"), py::arg("distance"), py::arg("bundle"),
        py::arg("drop1") = py::none(), py::arg("drop2") = py::none(),
        py::arg("horizon") = py::none());
  m.def("check_consistency", &consistency, py::arg("game"), py::arg("distance"), py::arg("bundle"),
        py::arg("drop1") = py::none(), py::arg("drop2") = py::none());
  m.def("mesh", &mesh, py::arg("game"), py::arg("distance"), py::arg("lo"), py::arg("hi"),
        py::arg("step"), py::arg("workers") = 0);
  m.def("bracket", &bracket, py::arg("game"), py::arg("distance"), py::arg("lo"), py::arg("hi"),
        py::arg("step"), py::arg("guard") = false, py::arg("workers") = 0);
  m.def("reference_bundle", &reference_bundle, py::arg("name"), py::arg("distance") = "16");
  m.def("repro", &repro, py::arg("which"), py::arg("workers") = 0);
}
