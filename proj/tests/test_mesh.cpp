#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rdv/errors.hpp"
#include "rdv/mesh_bounds.hpp"
#include "rdv/repro.hpp"
#include "rdv/solver.hpp"
#include "support.hpp"

using namespace rdv;
using support::r;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rdv_mesh_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Mesh1D line(std::vector<std::int64_t> v, const Rational& step = r(1)) {
  Mesh1D m;
  m.grid = make_grid(GameKind::kOneGift, r(16), r(0), step * r(static_cast<std::int64_t>(v.size()) - 1),
                     step);
  for (auto x : v) m.values.emplace_back(x);
  return m;
}

Rational solve_value(GameKind kind, std::optional<Rational> a, std::optional<Rational> b) {
  SolveOptions o;
  o.mode = SolveMode::kValueOnly;
  return solve_fixed_drops(GameInstance::make(kind, r(16), a, b), o).value;
}

const Mesh1D& coarse_1d() {
  static const Mesh1D m = sweep_1d(make_grid(GameKind::kOneGift, r(16), r(0), r(12), r(1, 4)));
  return m;
}

const Mesh2D& coarse_2d() {
  static const Mesh2D m = sweep_2d(make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(16), r(1, 2)));
  return m;
}

}  // namespace

TEST_CASE("grids are validated") {
  CHECK(make_grid(GameKind::kOneGift, r(16), r(0), r(4), r(1, 2)).size() == 9);
  CHECK_THROWS_AS(make_grid(GameKind::kOneGift, r(16), r(0), r(1), r(0)), ConfigError);
  CHECK_THROWS_AS(make_grid(GameKind::kOneGift, r(16), r(0), r(1), r(2, 3)), ConfigError);
  CHECK_THROWS_AS(make_grid(GameKind::kOneGift, r(16), r(2), r(1), r(1)), ConfigError);
  CHECK_THROWS_AS(make_grid(GameKind::kOneGift, r(16), r(-1), r(1), r(1)), ConfigError);
  const MeshGrid g = make_grid(GameKind::kOneGift, r(16), r(1), r(3), r(1, 2));
  CHECK(g.index_of(r(2)) == 2u);
  CHECK_FALSE(g.index_of(r(9, 4)));
}

TEST_CASE("worker count comes from the environment") {
  ::setenv("RDV_WORKERS", "3", 1);
  CHECK(default_worker_count() == 3u);
  ::setenv("RDV_WORKERS", "lots", 1);
  CHECK_THROWS_AS(default_worker_count(), ConfigError);
  ::unsetenv("RDV_WORKERS");
  CHECK(default_worker_count() >= 1u);
}

TEST_CASE("sweep values equal direct solves") {
  const Mesh1D m = sweep_1d(make_grid(GameKind::kOneGift, r(16), r(4), r(4), r(1)));
  REQUIRE(m.values.size() == 1);
  CHECK(m.values[0] == r(21));
  const Mesh2D m2 = sweep_2d(make_grid(GameKind::kTwoGiftsOr, r(16), r(6), r(8), r(1)));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m2.at(i, j) ==
            solve_value(GameKind::kTwoGiftsOr, m2.grid.point(i), m2.grid.point(j)));
    }
  }
  CHECK(m2.at(2, 2) == r(20));
}

TEST_CASE("sweep output does not depend on the worker count") {
  const MeshGrid g = make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(4), r(1));
  SweepOptions one, many;
  one.workers = 1;
  many.workers = 3;
  CHECK(mesh_csv(sweep_2d(g, one)) == mesh_csv(sweep_2d(g, many)));
}

TEST_CASE("CSV files: write, refuse to clobber, resume, read back") {
  TempDir dir;
  const std::string path = dir.file("m.csv");
  const MeshGrid g = make_grid(GameKind::kOneGift, r(16), r(3), r(5), r(1, 4));
  SweepOptions o;
  o.csv_path = path;
  const Mesh1D full = sweep_1d(g, o);
  const std::string text = slurp(path);
  CHECK(text == mesh_csv(full));
  CHECK(text.rfind("tau,value_num,value_den,value_decimal15\n", 0) == 0);
  CHECK(fs::exists(path + ".meta.json"));

  CHECK_THROWS_AS(sweep_1d(g, o), ConfigError);

  // Interrupted run: keep the header and two rows.
  {
    std::istringstream in(text);
    std::string line, partial;
    for (int k = 0; k < 3 && std::getline(in, line); ++k) partial += line + "\n";
    std::ofstream(path, std::ios::trunc) << partial;
  }
  o.resume = true;
  CHECK(mesh_csv(sweep_1d(g, o)) == text);
  CHECK(slurp(path) == text);

  // Resuming against a different grid is refused.
  CHECK_THROWS_AS(sweep_1d(make_grid(GameKind::kOneGift, r(16), r(3), r(5), r(1, 2)), o),
                  ConfigError);

  const Mesh1D back = read_mesh_1d(path);
  CHECK(back.values == full.values);
  CHECK(back.grid.step == r(1, 4));
  CHECK(mesh_csv_dimension(path) == 1);
}

TEST_CASE("shards merge into the full mesh") {
  TempDir dir;
  const MeshGrid g = make_grid(GameKind::kTwoGiftsOr, r(16), r(7), r(9), r(1, 2));
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < 3; ++k) {
    SweepOptions o;
    o.csv_path = dir.file("part" + std::to_string(k) + ".csv");
    o.shard_index = k;
    o.shard_count = 3;
    const auto cells = sweep_cells(g, true, o);
    for (std::size_t c = 0; c < cells.size(); ++c) CHECK(cells[c].has_value() == (c % 3 == k));
    parts.push_back(*o.csv_path);
  }
  const std::string merged = dir.file("merged.csv");
  merge_mesh_files(parts, merged);
  CHECK(slurp(merged) == mesh_csv(sweep_2d(g)));
  CHECK(mesh_csv_dimension(merged) == 2);
  CHECK_THROWS_AS(merge_mesh_files(parts, merged), ConfigError);
  CHECK_THROWS_AS(merge_mesh_files({parts[0], parts[1]}, dir.file("short.csv")), ConfigError);
}

TEST_CASE("malformed CSV input is a configuration error") {
  TempDir dir;
  std::ofstream(dir.file("bad.csv")) << "tau,value\n1,2\n";
  CHECK_THROWS_AS(read_mesh_1d(dir.file("bad.csv")), ConfigError);
  CHECK_THROWS_AS(read_mesh_1d(dir.file("missing.csv")), ConfigError);
  std::ofstream(dir.file("gap.csv")) << "tau,value_num,value_den,value_decimal15\n0/1,1,1,1\n2/1,1,1,1\n3/1,1,1,1\n";
  CHECK_THROWS_AS(read_mesh_1d(dir.file("gap.csv")), ConfigError);
}

TEST_CASE("audit: the fine one-gift window passes, a corrupted value does not") {
  Mesh1D m = table2_mesh();
  CHECK(lipschitz_audit(m).empty());
  m.values[3] += r(1, 1000);
  const auto v = lipschitz_audit(m);
  CHECK_FALSE(v.empty());
  bool combined = false;
  for (const auto& x : v) combined = combined || x.rule == "combined";
  CHECK(combined);
}

TEST_CASE("audit: coarse sweeps have no violations") {
  CHECK(lipschitz_audit(coarse_1d()).empty());
  CHECK(lipschitz_audit(coarse_2d()).empty());
}

TEST_CASE("audit: a corrupted 2-D value is flagged") {
  Mesh2D m = sweep_2d(make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(2), r(1)));
  CHECK(lipschitz_audit(m).empty());
  m.values[1 * 3 + 1] -= r(3);
  CHECK_FALSE(lipschitz_audit(m).empty());
}

TEST_CASE("1-D bracket: constant mesh keeps everything") {
  const Mesh1D m = line({5, 5, 5, 5, 5});
  const BracketReport b = bracket_1d(m);
  CHECK(b.lower == r(4));
  CHECK(b.upper == r(5));
  CHECK(b.cell_count == 4);
  CHECK(b.candidates.size() == 4);
  CHECK(b.argmin.size() == 5);
}

TEST_CASE("1-D bracket: steep sides leave the two cells next to the minimum") {
  const Mesh1D m = line({16, 14, 12, 10, 11, 12, 13});
  const BracketReport b = bracket_1d(m);
  REQUIRE(b.candidates.size() == 2);
  CHECK(b.candidates[0].i0 == 2);
  CHECK(b.candidates[0].i1 == 3);
  CHECK(b.candidates[1].i0 == 3);
  CHECK(b.candidates[1].i1 == 4);
  CHECK(b.candidate_box[0] == std::pair{r(2), r(4)});
}

TEST_CASE("1-D bracket matches the set definition on random meshes") {
  support::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> v;
    const int n = 2 + static_cast<int>(gen.below(12));
    for (int k = 0; k < n; ++k) v.push_back(gen.below(8));
    const Mesh1D m = line(v);
    const std::int64_t lo = *std::min_element(v.begin(), v.end());
    std::vector<std::size_t> expect;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] - 1 <= lo) expect.push_back(i);
    }
    const BracketReport b = bracket_1d(m);
    REQUIRE(b.candidates.size() == expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(b.candidates[k].i1 == expect[k]);
  }
}

TEST_CASE("2-D bracket matches the set definition on random meshes") {
  support::Gen gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen.below(5));
    Mesh2D m;
    m.grid = make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(static_cast<std::int64_t>(n) - 1), r(1));
    for (std::size_t k = 0; k < n * n; ++k) m.values.emplace_back(gen.below(10));
    for (bool guard : {false, true}) {
      const std::size_t lines = guard ? n - 1 : n;
      Rational lo = m.at(0, 0);
      for (std::size_t i = 0; i < lines; ++i)
        for (std::size_t j = 0; j < lines; ++j) lo = min(lo, m.at(i, j));
      std::size_t count = 0;
      for (std::size_t i = 1; i < lines; ++i) {
        for (std::size_t j = 1; j < lines; ++j) {
          const bool a = i >= j && (i + 1 >= n || m.at(i + 1, j) <= lo + r(2));
          const bool b = j >= i && (j + 1 >= n || m.at(i, j + 1) <= lo + r(2));
          count += (a || b) ? 1 : 0;
        }
      }
      const BracketReport rep = bracket_2d(m, guard);
      CHECK(rep.x_min == lo);
      CHECK(rep.candidates.size() == count);
    }
  }
}

TEST_CASE("2-D bracket: uniform mesh keeps every cell") {
  Mesh2D m;
  m.grid = make_grid(GameKind::kTwoGiftsOr, r(16), r(0), r(3), r(1));
  m.values.assign(16, r(7));
  const BracketReport b = bracket_2d(m);
  CHECK(b.cell_count == 9);
  CHECK(b.candidates.size() == 9);
  CHECK(b.lower == r(5));
  CHECK(b.upper == r(7));
}

TEST_CASE("excluded cells hold no better drop times") {
  support::Gen gen(21);
  const Mesh1D& m = coarse_1d();
  const BracketReport b = bracket_1d(m);
  std::vector<std::size_t> excluded;
  for (std::size_t i = 1; i < m.values.size(); ++i) {
    bool kept = false;
    for (const auto& c : b.candidates) kept = kept || c.i1 == i;
    if (!kept) excluded.push_back(i);
  }
  REQUIRE_FALSE(excluded.empty());
  for (int k = 0; k < 12; ++k) {
    const std::size_t i = excluded[static_cast<std::size_t>(gen.below(static_cast<std::int64_t>(excluded.size())))];
    const Rational at = m.grid.point(i - 1) + gen.in(r(0), r(1)) * m.grid.step;
    CHECK(solve_value(GameKind::kOneGift, std::nullopt, at) >= b.x_min);
  }

  const Mesh2D& m2 = coarse_2d();
  const BracketReport b2 = bracket_2d(m2);
  std::set<std::pair<std::size_t, std::size_t>> kept;
  for (const auto& c : b2.candidates) kept.insert({c.i1, *c.j1});
  int checked = 0;
  for (int k = 0; k < 400 && checked < 12; ++k) {
    const std::size_t n = m2.grid.size();
    const std::size_t i = 1 + static_cast<std::size_t>(gen.below(static_cast<std::int64_t>(n - 1)));
    const std::size_t j = 1 + static_cast<std::size_t>(gen.below(static_cast<std::int64_t>(n - 1)));
    if (kept.count({i, j})) continue;
    const Rational a = m2.grid.point(i - 1) + gen.in(r(0), r(1)) * m2.grid.step;
    const Rational c = m2.grid.point(j - 1) + gen.in(r(0), r(1)) * m2.grid.step;
    CHECK(solve_value(GameKind::kTwoGiftsAnd, a, c) >= b2.x_min);
    ++checked;
  }
  CHECK(checked == 12);
}

TEST_CASE("a half-step refinement lands inside the coarse interval") {
  const BracketReport coarse = bracket_1d(coarse_1d());
  const BracketReport fine =
      bracket_1d(sweep_1d(make_grid(GameKind::kOneGift, r(16), r(0), r(12), r(1, 8))));
  CHECK(fine.x_min >= coarse.lower);
  CHECK(fine.x_min <= coarse.upper);
}

TEST_CASE("coarse both-gifts sweep: symmetric, and the known loci survive") {
  const Mesh2D& m = coarse_2d();
  const std::size_t n = m.grid.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(m.at(i, j) == m.at(j, i));
  const BracketReport b = bracket_2d(m);
  CHECK(b.x_min == r(24));
  auto has = [&](const Rational& x, const Rational& y) {
    for (const auto& c : b.candidates) {
      if (m.grid.point(c.i0) <= x && x <= m.grid.point(c.i1) && m.grid.point(*c.j0) <= y &&
          y <= m.grid.point(*c.j1))
        return true;
    }
    return false;
  };
  CHECK(has(r(0), r(0)));
  CHECK(has(r(8), r(8)));
  for (std::int64_t y : {1, 3, 6, 10}) CHECK(has(r(4), r(y)));
}

TEST_CASE("bracketing is a pure function of the values") {
  const BracketReport a = bracket_1d(coarse_1d()), b = bracket_1d(coarse_1d());
  CHECK(bracket_to_json(a).dump() == bracket_to_json(b).dump());
}
