#include "rdv/mesh_bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rdv/errors.hpp"
#include "rdv/solver.hpp"

namespace rdv {

namespace {

constexpr const char* kHeader1 = "tau,value_num,value_den,value_decimal15";
constexpr const char* kHeader2 = "tau1,tau2,value_num,value_den,value_decimal15";

std::string csv_row(const std::vector<Rational>& taus, const Rational& v) {
  std::string row;
  for (const auto& t : taus) row += t.str() + ",";
  row += std::to_string(v.num()) + "," + std::to_string(v.den()) + "," + v.decimal(15);
  return row;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Rational parse_field(const std::string& text, const std::string& where) {
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": bad number '" + text + "'");
  }
}

struct CsvRow {
  std::vector<Rational> taus;
  Rational value;
};

std::vector<CsvRow> read_rows(const std::string& path, int dims) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expect = dims == 1 ? kHeader1 : kHeader2;
  if (line != expect) throw ConfigError(path + ": expected header '" + expect + "'");
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    auto f = split(line);
    if (f.size() != static_cast<std::size_t>(dims) + 3) {
      // A torn final line from an interrupted run is dropped; anything else
      // is an error.
      if (in.peek() == EOF) break;
      throw ConfigError(where + ": wrong number of fields");
    }
    CsvRow r;
    for (int k = 0; k < dims; ++k) r.taus.push_back(parse_field(f[static_cast<std::size_t>(k)], where));
    const Rational num = parse_field(f[static_cast<std::size_t>(dims)], where);
    const Rational den = parse_field(f[static_cast<std::size_t>(dims) + 1], where);
    if (den.sign() <= 0 || num.den() != 1 || den.den() != 1) {
      throw ConfigError(where + ": value_num/value_den must be integers with den > 0");
    }
    r.value = num / den;
    rows.push_back(std::move(r));
  }
  return rows;
}

Json grid_meta(const MeshGrid& g, bool two_d) {
  Json j;
  j["dimensions"] = two_d ? 2 : 1;
  j["game"] = std::string(to_string(g.kind));
  j["D"] = rational_to_json(g.distance);
  j["lo"] = rational_to_json(g.lo);
  j["hi"] = rational_to_json(g.hi);
  j["step"] = rational_to_json(g.step);
  j["T"] = g.horizon ? rational_to_json(*g.horizon) : Json();
  return j;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << text;
    if (!out) throw ConfigError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot replace " + path + ": " + ec.message());
}

std::string render(const MeshGrid& grid, bool two_d,
                   const std::vector<std::optional<Rational>>& cells) {
  std::string text = std::string(two_d ? kHeader2 : kHeader1) + "\n";
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!cells[k]) continue;
    std::vector<Rational> taus;
    if (two_d) {
      taus = {grid.point(k / n), grid.point(k % n)};
    } else {
      taus = {grid.point(k)};
    }
    text += csv_row(taus, *cells[k]) + "\n";
  }
  return text;
}

GameInstance cell_instance(const MeshGrid& grid, bool two_d, std::size_t k) {
  const std::size_t n = grid.size();
  if (two_d) {
    return GameInstance::make(grid.kind, grid.distance, grid.point(k / n), grid.point(k % n),
                              grid.horizon);
  }
  return GameInstance::make(grid.kind, grid.distance, std::nullopt, grid.point(k), grid.horizon);
}

MeshGrid infer_grid(std::vector<Rational> taus, const std::string& path) {
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  if (taus.empty()) throw ConfigError(path + ": no rows");
  MeshGrid g;
  g.lo = taus.front();
  g.hi = taus.back();
  g.step = taus.size() > 1 ? taus[1] - taus[0] : Rational(0);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] != g.point(i)) throw ConfigError(path + ": tau values are not a regular grid");
  }
  return g;
}

}  // namespace

std::size_t MeshGrid::size() const {
  if (step.is_zero()) return 1;
  return static_cast<std::size_t>(((hi - lo) / step).num()) + 1;
}

std::optional<std::size_t> MeshGrid::index_of(const Rational& tau) const {
  if (tau < lo || tau > hi) return std::nullopt;
  if (step.is_zero()) return tau == lo ? std::optional<std::size_t>(0) : std::nullopt;
  const Rational q = (tau - lo) / step;
  if (q.den() != 1) return std::nullopt;
  return static_cast<std::size_t>(q.num());
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("RDV_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) {
      throw ConfigError(std::string("RDV_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

MeshGrid make_grid(GameKind kind, const Rational& distance, const Rational& lo, const Rational& hi,
                   const Rational& step, std::optional<Rational> horizon) {
  if (distance.sign() <= 0) throw ConfigError("D must be positive");
  if (lo.sign() < 0) throw ConfigError("drop times must be >= 0");
  if (hi < lo) throw ConfigError("mesh range must have lo <= hi");
  if (step.sign() <= 0) throw ConfigError("mesh step must be positive");
  const Rational q = (hi - lo) / step;
  if (q.den() != 1) throw ConfigError("mesh range is not a whole number of steps");
  if (q.num() > 100'000'000) throw ConfigError("mesh has too many points");
  MeshGrid g;
  g.kind = kind;
  g.distance = distance;
  g.lo = lo;
  g.hi = hi;
  g.step = step;
  g.horizon = horizon;
  // Surface instance errors (drop past T) before any work starts.
  (void)GameInstance::make(kind, distance, player_one_drops(kind) ? std::optional(hi) : std::nullopt,
                           player_two_drops(kind) ? std::optional(hi) : std::nullopt, horizon);
  return g;
}

std::vector<std::optional<Rational>> sweep_cells(const MeshGrid& grid, bool two_d,
                                                 const SweepOptions& options) {
  if (two_d && !player_one_drops(grid.kind)) {
    throw ConfigError("2-D sweeps need a two-gift game (g2or, g2and)");
  }
  if (!two_d && grid.kind != GameKind::kOneGift) throw ConfigError("1-D sweeps need game g1");
  if (options.shard_count == 0 || options.shard_index >= options.shard_count) {
    throw ConfigError("shard index must be in [0, shard count)");
  }
  const std::size_t n = grid.size();
  const std::size_t total = two_d ? n * n : n;
  std::vector<std::optional<Rational>> cells(total);

  std::ofstream sink;
  if (options.csv_path) {
    const std::string& path = *options.csv_path;
    const std::string meta_path = path + ".meta.json";
    Json meta = grid_meta(grid, two_d);
    if (std::filesystem::exists(path)) {
      if (!options.resume) {
        throw ConfigError(path + " already exists; pass --resume to continue it or remove it");
      }
      if (!std::filesystem::exists(meta_path) || read_json_file(meta_path) != meta) {
        throw ConfigError(path + " was written for a different mesh (see " + meta_path + ")");
      }
      for (const auto& row : read_rows(path, two_d ? 2 : 1)) {
        std::size_t k = 0;
        auto i = grid.index_of(row.taus[0]);
        if (!i) throw ConfigError(path + ": row off the grid");
        k = *i;
        if (two_d) {
          auto j = grid.index_of(row.taus[1]);
          if (!j) throw ConfigError(path + ": row off the grid");
          k = *i * n + *j;
        }
        if (cells[k] && *cells[k] != row.value) {
          throw ConfigError(path + ": conflicting rows for the same drop times");
        }
        cells[k] = row.value;
      }
      // Drop any torn tail before appending.
      write_text_atomic(path, render(grid, two_d, cells));
    } else {
      write_json_file(meta_path, meta);
      write_text_atomic(path, std::string(two_d ? kHeader2 : kHeader1) + "\n");
    }
    sink.open(path, std::ios::app | std::ios::binary);
    if (!sink) throw ConfigError("cannot append to " + path);
  }

  std::vector<std::size_t> todo;
  for (std::size_t k = options.shard_index; k < total; k += options.shard_count) {
    if (!cells[k]) todo.push_back(k);
  }
  for (std::size_t k : todo) (void)cell_instance(grid, two_d, k);  // validate up front

  SolveOptions solve;
  solve.mode = SolveMode::kValueOnly;
  solve.symmetry_reduction = options.symmetry_reduction;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&] {
    while (!stop) {
      const std::size_t pos = next++;
      if (pos >= todo.size()) return;
      const std::size_t k = todo[pos];
      try {
        const Rational v = solve_fixed_drops(cell_instance(grid, two_d, k), solve).value;
        std::lock_guard<std::mutex> lock(mu);
        cells[k] = v;
        if (sink.is_open()) {
          std::vector<Rational> taus =
              two_d ? std::vector<Rational>{grid.point(k / n), grid.point(k % n)}
                    : std::vector<Rational>{grid.point(k)};
          sink << csv_row(taus, v) << '\n' << std::flush;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers ? options.workers : default_worker_count(),
                                      static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (sink.is_open()) sink.close();
  if (failure) std::rethrow_exception(failure);

  if (options.csv_path) write_text_atomic(*options.csv_path, render(grid, two_d, cells));
  return cells;
}

Mesh1D sweep_1d(const MeshGrid& grid, const SweepOptions& options) {
  if (options.shard_count != 1) throw ConfigError("sweep_1d needs the whole mesh; use sweep_cells");
  auto cells = sweep_cells(grid, false, options);
  Mesh1D m{grid, {}};
  for (auto& c : cells) m.values.push_back(*c);
  return m;
}

Mesh2D sweep_2d(const MeshGrid& grid, const SweepOptions& options) {
  if (options.shard_count != 1) throw ConfigError("sweep_2d needs the whole mesh; use sweep_cells");
  auto cells = sweep_cells(grid, true, options);
  Mesh2D m{grid, {}};
  for (auto& c : cells) m.values.push_back(*c);
  return m;
}

std::string mesh_csv(const Mesh1D& mesh) {
  std::vector<std::optional<Rational>> cells(mesh.values.begin(), mesh.values.end());
  return render(mesh.grid, false, cells);
}

std::string mesh_csv(const Mesh2D& mesh) {
  std::vector<std::optional<Rational>> cells(mesh.values.begin(), mesh.values.end());
  return render(mesh.grid, true, cells);
}

int mesh_csv_dimension(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == kHeader1) return 1;
  if (line == kHeader2) return 2;
  throw ConfigError(path + ": not a mesh CSV (unknown header)");
}

Mesh1D read_mesh_1d(const std::string& path, GameKind kind, const Rational& distance) {
  auto rows = read_rows(path, 1);
  std::vector<Rational> taus;
  for (const auto& r : rows) taus.push_back(r.taus[0]);
  Mesh1D m;
  m.grid = infer_grid(taus, path);
  m.grid.kind = kind;
  m.grid.distance = distance;
  std::vector<std::optional<Rational>> cells(m.grid.size());
  for (const auto& r : rows) {
    auto& c = cells[*m.grid.index_of(r.taus[0])];
    if (c && *c != r.value) throw ConfigError(path + ": conflicting rows");
    c = r.value;
  }
  for (auto& c : cells) m.values.push_back(*c);
  return m;
}

Mesh2D read_mesh_2d(const std::string& path, GameKind kind, const Rational& distance) {
  auto rows = read_rows(path, 2);
  std::vector<Rational> taus;
  for (const auto& r : rows) {
    taus.push_back(r.taus[0]);
    taus.push_back(r.taus[1]);
  }
  Mesh2D m;
  m.grid = infer_grid(taus, path);
  m.grid.kind = kind;
  m.grid.distance = distance;
  const std::size_t n = m.grid.size();
  std::vector<std::optional<Rational>> cells(n * n);
  for (const auto& r : rows) {
    auto& c = cells[*m.grid.index_of(r.taus[0]) * n + *m.grid.index_of(r.taus[1])];
    if (c && *c != r.value) throw ConfigError(path + ": conflicting rows");
    c = r.value;
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!cells[k]) {
      throw ConfigError(path + ": missing value at (" + m.grid.point(k / n).str() + ", " +
                        m.grid.point(k % n).str() + ")");
    }
    m.values.push_back(*cells[k]);
  }
  return m;
}

void merge_mesh_files(const std::vector<std::string>& inputs, const std::string& out_path) {
  if (inputs.empty()) throw ConfigError("nothing to merge");
  const int dims = mesh_csv_dimension(inputs.front());
  std::map<std::vector<Rational>, Rational> merged;
  for (const auto& path : inputs) {
    if (mesh_csv_dimension(path) != dims) throw ConfigError(path + ": dimension mismatch");
    for (const auto& r : read_rows(path, dims)) {
      auto [it, fresh] = merged.emplace(r.taus, r.value);
      if (!fresh && it->second != r.value) {
        throw ConfigError(path + ": disagrees with another shard at " + r.taus[0].str());
      }
    }
  }
  // The union must be a full grid: a missing shard leaves holes.
  std::vector<Rational> taus;
  for (const auto& [t, v] : merged) taus.insert(taus.end(), t.begin(), t.end());
  const std::size_t n = infer_grid(taus, inputs.front()).size();
  const std::size_t want = dims == 1 ? n : n * n;
  if (merged.size() != want) {
    throw ConfigError("shards cover " + std::to_string(merged.size()) + " of " +
                      std::to_string(want) + " cells; is a shard missing?");
  }
  if (std::filesystem::exists(out_path)) {
    throw ConfigError(out_path + " already exists; refusing to overwrite");
  }
  std::string text = std::string(dims == 1 ? kHeader1 : kHeader2) + "\n";
  for (const auto& [taus, v] : merged) text += csv_row(taus, v) + "\n";
  write_text_atomic(out_path, text);
}

// Audits -------------------------------------------------------------------------

std::vector<AuditViolation> lipschitz_audit(const Mesh1D& mesh) {
  std::vector<AuditViolation> out;
  const Rational a = mesh.grid.step;
  for (std::size_t i = 0; i + 1 < mesh.values.size(); ++i) {
    const Rational& x0 = mesh.values[i];
    const Rational& x1 = mesh.values[i + 1];
    const std::vector<Rational> at{mesh.grid.point(i)};
    if (x0 < x1 - a) out.push_back({"forward", at, x0, x1 - a});
    if (x1 < x0 - Rational(2) * a) out.push_back({"backward", at, x1, x0 - Rational(2) * a});
    if (abs(x1 - x0) > a) out.push_back({"combined", at, a, abs(x1 - x0)});
  }
  return out;
}

std::vector<AuditViolation> lipschitz_audit(const Mesh2D& mesh) {
  std::vector<AuditViolation> out;
  const Rational a = mesh.grid.step;
  const std::size_t n = mesh.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& x = mesh.at(i, j);
      const std::vector<Rational> at{mesh.grid.point(i), mesh.grid.point(j)};
      if (i + 1 < n && i >= j && x < mesh.at(i + 1, j) - a) {
        out.push_back({"first", at, x, mesh.at(i + 1, j) - a});
      }
      if (i + 1 < n && j + 1 < n && x < mesh.at(i + 1, j + 1) - a) {
        out.push_back({"diagonal", at, x, mesh.at(i + 1, j + 1) - a});
      }
      if (j + 1 < n && j >= i && x < mesh.at(i, j + 1) - a) {
        out.push_back({"second", at, x, mesh.at(i, j + 1) - a});
      }
    }
  }
  return out;
}

// Brackets -----------------------------------------------------------------------

namespace {

void fill_box(BracketReport& r, const MeshGrid& g, bool two_d) {
  if (r.candidates.empty()) return;
  std::size_t i0 = r.candidates.front().i0, i1 = r.candidates.front().i1;
  std::size_t j0 = 0, j1 = 0;
  if (two_d) {
    j0 = *r.candidates.front().j0;
    j1 = *r.candidates.front().j1;
  }
  for (const auto& c : r.candidates) {
    i0 = std::min(i0, c.i0);
    i1 = std::max(i1, c.i1);
    if (two_d) {
      j0 = std::min(j0, *c.j0);
      j1 = std::max(j1, *c.j1);
    }
  }
  r.candidate_box.emplace_back(g.point(i0), g.point(i1));
  if (two_d) r.candidate_box.emplace_back(g.point(j0), g.point(j1));
}

}  // namespace

BracketReport bracket_1d(const Mesh1D& mesh) {
  if (mesh.values.empty()) throw ConfigError("empty mesh");
  BracketReport r;
  r.step = mesh.grid.step;
  r.x_min = *std::min_element(mesh.values.begin(), mesh.values.end());
  r.lower = r.x_min - r.step;
  r.upper = r.x_min;
  for (std::size_t i = 0; i < mesh.values.size(); ++i) {
    if (mesh.values[i] == r.x_min) r.argmin.push_back({mesh.grid.point(i)});
  }
  for (std::size_t i = 1; i < mesh.values.size(); ++i) {
    ++r.cell_count;
    if (mesh.values[i] - r.step <= r.x_min) r.candidates.push_back({i - 1, i, {}, {}});
  }
  fill_box(r, mesh.grid, false);
  return r;
}

BracketReport bracket_2d(const Mesh2D& mesh, bool guard) {
  if (mesh.values.empty()) throw ConfigError("empty mesh");
  const std::size_t n = mesh.grid.size();
  if (guard && n < 2) throw ConfigError("a guarded bracket needs at least two grid lines");
  const std::size_t m = guard ? n - 1 : n;  // grid lines inside the bracketed domain
  BracketReport r;
  r.step = mesh.grid.step;
  r.x_min = mesh.at(0, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) r.x_min = min(r.x_min, mesh.at(i, j));
  }
  r.lower = r.x_min - Rational(2) * r.step;
  r.upper = r.x_min;
  const Rational threshold = r.x_min + Rational(2) * r.step;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (mesh.at(i, j) == r.x_min) r.argmin.push_back({mesh.grid.point(i), mesh.grid.point(j)});
    }
  }
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 1; j < m; ++j) {
      ++r.cell_count;
      bool keep = false;
      if (i >= j) keep = keep || i + 1 >= n || mesh.at(i + 1, j) <= threshold;
      if (j >= i) keep = keep || j + 1 >= n || mesh.at(i, j + 1) <= threshold;
      if (keep) r.candidates.push_back({i - 1, i, j - 1, j});
    }
  }
  fill_box(r, mesh.grid, true);
  return r;
}

Json bracket_to_json(const BracketReport& report) {
  Json j;
  j["x_min"] = rational_to_json(report.x_min);
  j["interval"] = Json::array({rational_to_json(report.lower), rational_to_json(report.upper)});
  Json cands = Json::array();
  for (const auto& c : report.candidates) {
    Json cj;
    cj["i0"] = c.i0;
    cj["i1"] = c.i1;
    if (c.j0) {
      cj["j0"] = *c.j0;
      cj["j1"] = *c.j1;
    }
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  j["step"] = rational_to_json(report.step);
  Json argmin = Json::array();
  for (const auto& p : report.argmin) {
    Json pj = Json::array();
    for (const auto& v : p) pj.push_back(rational_to_json(v));
    argmin.push_back(pj);
  }
  j["argmin"] = argmin;
  j["cell_count"] = report.cell_count;
  j["excluded_count"] = report.cell_count - report.candidates.size();
  Json box = Json::array();
  for (const auto& [lo, hi] : report.candidate_box) {
    box.push_back(Json::array({rational_to_json(lo), rational_to_json(hi)}));
  }
  j["candidate_box"] = box;
  j["interval_decimal15"] = Json::array({report.lower.decimal(15), report.upper.decimal(15)});
  return j;
}

Json audit_to_json(const std::vector<AuditViolation>& violations) {
  Json out = Json::array();
  for (const auto& v : violations) {
    Json j;
    j["rule"] = v.rule;
    Json at = Json::array();
    for (const auto& p : v.at) at.push_back(rational_to_json(p));
    j["at"] = at;
    j["lhs"] = rational_to_json(v.lhs);
    j["rhs"] = rational_to_json(v.rhs);
    out.push_back(j);
  }
  return out;
}

}  // namespace rdv
