// Command-line front end. Exit codes: 0 ok, 2 bad configuration, 3 model or
// consistency error, 4 horizon too small.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rdv/errors.hpp"
#include "rdv/evaluator.hpp"
#include "rdv/mesh_bounds.hpp"
#include "rdv/repro.hpp"
#include "rdv/serialization.hpp"
#include "rdv/solver.hpp"

namespace {

using namespace rdv;

struct InstanceFlags {
  std::string game;
  std::string distance = "16";
  std::string drop1;
  std::string drop2;
  std::string horizon;

  void add_to(CLI::App* app, bool game_required) {
    auto* g = app->add_option("--game", game, "g, g1, g2or or g2and");
    if (game_required) g->required();
    app->add_option("--distance,-D", distance, "initial distance D (default 16)");
    app->add_option("--drop1", drop1, "Player I drop time");
    app->add_option("--drop2", drop2, "Player II drop time");
    app->add_option("--horizon,-T", horizon, "horizon T (default 4D)");
  }
};

Rational number(const std::string& text, const char* what) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad value for ") + what + ": '" + text + "'");
  }
}

std::optional<Rational> maybe(const std::string& text, const char* what) {
  if (text.empty()) return std::nullopt;
  return number(text, what);
}

GameKind game_kind(const std::string& text) {
  try {
    return parse_game_kind(text);
  } catch (const Error&) {
    throw ConfigError("unknown game '" + text + "' (expected g, g1, g2or, g2and)");
  }
}

GameInstance instance_from(const InstanceFlags& f) {
  return GameInstance::make(game_kind(f.game), number(f.distance, "--distance"),
                            maybe(f.drop1, "--drop1"), maybe(f.drop2, "--drop2"),
                            maybe(f.horizon, "--horizon"));
}

GameInstance instance_from_json(const Json& j) {
  auto opt = [&](const char* key) -> std::optional<Rational> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return rational_from_json(j.at(key));
  };
  if (!j.contains("game") || !j.contains("D")) throw ConfigError("instance needs game and D");
  return GameInstance::make(game_kind(j.at("game").get<std::string>()), rational_from_json(j.at("D")),
                            opt("tau1"), opt("tau2"), opt("T"));
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + out_path);
  out << text;
  if (!out) throw ConfigError("write failed for " + out_path);
}

Json solve_result_json(const GameInstance& inst, const SolveResult& r) {
  Json j;
  j["instance"] = instance_to_json(inst);
  j["value"] = rational_to_json(r.value);
  j["value_decimal15"] = r.value.decimal(15);
  j["node_count"] = r.node_count;
  j["bundles_truncated"] = r.bundles_truncated;
  Json bundles = Json::array();
  for (const auto& b : r.optimal_bundles) bundles.push_back(bundle_to_json(b));
  j["optimal_bundles"] = bundles;
  return j;
}

std::pair<Rational, Rational> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--range must look like lo:hi");
  return {number(text.substr(0, colon), "--range"), number(text.substr(colon + 1), "--range")};
}

int run(int argc, char** argv) {
  CLI::App app{"Exact rendezvous values on the line, with and without gifts"};
  app.require_subcommand(1);

  // eval
  InstanceFlags eval_inst;
  std::string eval_bundle, eval_out;
  std::size_t eval_index = 0;
  auto* eval = app.add_subcommand("eval", "evaluate a strategy bundle");
  eval_inst.add_to(eval, false);
  eval->add_option("--bundle,-b", eval_bundle, "bundle JSON, or a solve result")->required();
  eval->add_option("--index", eval_index, "which optimal bundle of a solve result (default 0)");
  eval->add_option("--out,-o", eval_out, "output file (default stdout)");

  // solve
  InstanceFlags solve_inst;
  std::string solve_mode = "all", solve_out;
  std::size_t max_bundles = 10000;
  bool symmetry = false, no_prune = false;
  auto* solve = app.add_subcommand("solve", "optimal value and bundles for fixed drop times");
  solve_inst.add_to(solve, true);
  solve->add_option("--mode", solve_mode, "all, one or value (default all)");
  solve->add_option("--max-bundles", max_bundles, "cap on returned bundles");
  solve->add_flag("--symmetry", symmetry, "fix Player I's first move");
  solve->add_flag("--no-prune-senseless", no_prune, "keep directions with nothing ahead");
  solve->add_option("--out,-o", solve_out, "output file (default stdout)");

  // mesh
  InstanceFlags mesh_inst;
  std::string mesh_range, mesh_step, mesh_out, mesh_shard;
  std::vector<std::string> merge_inputs;
  bool mesh_resume = false;
  unsigned mesh_workers = 0;
  auto* mesh = app.add_subcommand("mesh", "sweep drop times on a regular grid into CSV");
  mesh_inst.add_to(mesh, false);
  mesh->add_option("--range", mesh_range, "lo:hi (default 0:3D for g1, 0:D otherwise)");
  mesh->add_option("--step", mesh_step, "grid step (default D/64 for g1, D/32 otherwise)");
  mesh->add_option("--out,-o", mesh_out, "CSV file")->required();
  mesh->add_flag("--resume", mesh_resume, "continue an interrupted sweep in --out");
  mesh->add_option("--workers,-j", mesh_workers, "worker threads (default RDV_WORKERS or all cores)");
  mesh->add_option("--shard", mesh_shard, "k/n: compute every n-th cell starting at k");
  mesh->add_option("--merge", merge_inputs, "merge these shard CSVs into --out instead of sweeping");

  // bracket
  std::string bracket_mesh, bracket_out;
  bool bracket_guard = false, bracket_audit = false;
  auto* bracket = app.add_subcommand("bracket", "value interval and candidate cells from a mesh CSV");
  bracket->add_option("--mesh,-m", bracket_mesh, "mesh CSV")->required();
  bracket->add_flag("--guard", bracket_guard, "use the last grid line only as neighbour values (2-D)");
  bracket->add_flag("--audit", bracket_audit, "also list shift-inequality violations");
  bracket->add_option("--out,-o", bracket_out, "output file (default stdout)");

  // repro
  std::string repro_which = "all", repro_dir;
  bool repro_force = false;
  unsigned repro_workers = 0;
  auto* repro = app.add_subcommand("repro", "regenerate the reference tables and brackets");
  repro->add_option("which", repro_which, "table1, table2, table3, exclusion or all");
  repro->add_option("--out-dir", repro_dir, "write the data files here");
  repro->add_flag("--force", repro_force, "overwrite existing files in --out-dir");
  repro->add_option("--workers,-j", repro_workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*eval) {
    Json doc = read_json_file(eval_bundle);
    Json bundle_json = doc;
    std::optional<GameInstance> inst;
    if (doc.contains("optimal_bundles")) {
      const auto& list = doc.at("optimal_bundles");
      if (eval_index >= list.size()) throw ConfigError("--index out of range");
      bundle_json = list.at(eval_index);
    }
    if (!eval_inst.game.empty()) {
      inst = instance_from(eval_inst);
    } else if (doc.contains("instance")) {
      inst = instance_from_json(doc.at("instance"));
    } else {
      throw ConfigError("no instance: pass --game (and drops) or a file with an \"instance\"");
    }
    const StrategyBundle b = bundle_from_json(bundle_json);
    Json j;
    j["instance"] = instance_to_json(*inst);
    j["outcome"] = outcome_to_json(evaluate_bundle(*inst, b));
    emit(j.dump(2) + "\n", eval_out);
    return 0;
  }

  if (*solve) {
    const GameInstance inst = instance_from(solve_inst);
    SolveOptions o;
    if (solve_mode == "all") {
      o.mode = SolveMode::kAllOptima;
    } else if (solve_mode == "one") {
      o.mode = SolveMode::kOneOptimum;
    } else if (solve_mode == "value") {
      o.mode = SolveMode::kValueOnly;
    } else {
      throw ConfigError("--mode must be all, one or value");
    }
    o.max_bundles = max_bundles;
    o.symmetry_reduction = symmetry;
    o.prune_senseless = !no_prune;
    emit(solve_result_json(inst, solve_fixed_drops(inst, o)).dump(2) + "\n", solve_out);
    return 0;
  }

  if (*mesh) {
    if (!merge_inputs.empty()) {
      merge_mesh_files(merge_inputs, mesh_out);
      return 0;
    }
    if (mesh_inst.game.empty()) throw ConfigError("--game is required");
    const GameKind kind = game_kind(mesh_inst.game);
    const Rational d = number(mesh_inst.distance, "--distance");
    const bool two_d = player_one_drops(kind);
    Rational lo(0), hi = two_d ? d : Rational(3) * d;
    if (!mesh_range.empty()) std::tie(lo, hi) = parse_range(mesh_range);
    const Rational step = mesh_step.empty() ? d / Rational(two_d ? 32 : 64)
                                            : number(mesh_step, "--step");
    SweepOptions o;
    o.workers = mesh_workers;
    o.csv_path = mesh_out;
    o.resume = mesh_resume;
    if (!mesh_shard.empty()) {
      const auto slash = mesh_shard.find('/');
      if (slash == std::string::npos) throw ConfigError("--shard must look like k/n");
      try {
        o.shard_index = std::stoul(mesh_shard.substr(0, slash));
        o.shard_count = std::stoul(mesh_shard.substr(slash + 1));
      } catch (const std::exception&) {
        throw ConfigError("--shard must look like k/n");
      }
    }
    const MeshGrid grid = make_grid(kind, d, lo, hi, step, maybe(mesh_inst.horizon, "--horizon"));
    sweep_cells(grid, two_d, o);
    return 0;
  }

  if (*bracket) {
    Json j;
    if (mesh_csv_dimension(bracket_mesh) == 1) {
      const Mesh1D m = read_mesh_1d(bracket_mesh);
      j = bracket_to_json(bracket_1d(m));
      if (bracket_audit) j["violations"] = audit_to_json(lipschitz_audit(m));
    } else {
      const Mesh2D m = read_mesh_2d(bracket_mesh, GameKind::kTwoGiftsAnd, Rational(16));
      j = bracket_to_json(bracket_2d(m, bracket_guard));
      if (bracket_audit) j["violations"] = audit_to_json(lipschitz_audit(m));
    }
    emit(j.dump(2) + "\n", bracket_out);
    return 0;
  }

  if (*repro) {
    const ReproOutput out = run_repro(repro_which, repro_workers);
    if (!repro_dir.empty()) {
      std::filesystem::create_directories(repro_dir);
      for (const auto& [name, _] : out.files) {
        const auto path = std::filesystem::path(repro_dir) / name;
        if (std::filesystem::exists(path) && !repro_force) {
          throw ConfigError(path.string() + " exists; pass --force to overwrite");
        }
      }
      for (const auto& [name, text] : out.files) {
        emit(text, (std::filesystem::path(repro_dir) / name).string());
      }
    }
    std::cout << out.text;
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const HorizonError& e) {
    std::cerr << "horizon: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "model: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
