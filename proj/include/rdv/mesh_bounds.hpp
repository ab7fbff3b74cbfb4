#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rdv/line_model.hpp"
#include "rdv/serialization.hpp"

namespace rdv {

// Regular grid d_i = lo + i*step, i = 0..N, with (hi - lo) / step == N.
struct MeshGrid {
  GameKind kind = GameKind::kOneGift;
  Rational distance;
  Rational lo;
  Rational hi;
  Rational step;
  std::optional<Rational> horizon;

  std::size_t size() const;  // N + 1
  Rational point(std::size_t i) const { return lo + Rational(static_cast<std::int64_t>(i)) * step; }
  // Index of an on-grid value, or nullopt.
  std::optional<std::size_t> index_of(const Rational& tau) const;
};

// Player II's drop time swept over the grid (one-gift game).
struct Mesh1D {
  MeshGrid grid;
  std::vector<Rational> values;  // values[i] = x(d_i)
};

// Both drop times swept over the same grid; values[i * size + j] = x(d_i, d_j)
// with d_i Player I's drop time.
struct Mesh2D {
  MeshGrid grid;
  std::vector<Rational> values;
  const Rational& at(std::size_t i, std::size_t j) const { return values[i * grid.size() + j]; }
};

struct SweepOptions {
  // 0 means: RDV_WORKERS from the environment, else the hardware count.
  unsigned workers = 0;
  // When set, rows are appended here as cells finish and the file is
  // rewritten in grid order at the end. An existing file is only reused
  // with resume = true and a matching "<csv>.meta.json".
  std::optional<std::string> csv_path;
  bool resume = false;
  // Compute only cells with flat index % shard_count == shard_index.
  std::size_t shard_index = 0;
  std::size_t shard_count = 1;
  bool symmetry_reduction = false;
};

unsigned default_worker_count();

// Validates kind/range/step. Throws ConfigError.
MeshGrid make_grid(GameKind kind, const Rational& distance, const Rational& lo, const Rational& hi,
                   const Rational& step, std::optional<Rational> horizon = std::nullopt);

// Cells not computed (other shards) are absent from the CSV and left as
// nullopt in the returned partial vector; the complete-mesh entry points
// below require every cell.
std::vector<std::optional<Rational>> sweep_cells(const MeshGrid& grid, bool two_dimensional,
                                                 const SweepOptions& options = {});

Mesh1D sweep_1d(const MeshGrid& grid, const SweepOptions& options = {});
Mesh2D sweep_2d(const MeshGrid& grid, const SweepOptions& options = {});

// CSV text (header + rows in grid order).
std::string mesh_csv(const Mesh1D& mesh);
std::string mesh_csv(const Mesh2D& mesh);

// Reads a complete mesh CSV. The grid is inferred from the tau columns, which
// must form a full regular grid. Throws ConfigError.
Mesh1D read_mesh_1d(const std::string& path, GameKind kind = GameKind::kOneGift,
                    const Rational& distance = Rational(16));
Mesh2D read_mesh_2d(const std::string& path, GameKind kind, const Rational& distance);
// 1 or 2 from the header; throws ConfigError for anything else.
int mesh_csv_dimension(const std::string& path);

// Merges shard files into one complete CSV at `out_path`. Rows must agree
// where shards overlap.
void merge_mesh_files(const std::vector<std::string>& inputs, const std::string& out_path);

struct AuditViolation {
  std::string rule;
  std::vector<Rational> at;    // the base point (tau or tau1, tau2)
  Rational lhs;
  Rational rhs;                // violated: lhs >= rhs fails
};

// 1-D rules per adjacent pair (l, l + a):
//   "forward"  x(l) >= x(l+a) - a
//   "backward" x(l+a) >= x(l) - 2a
//   "combined" |x(l+a) - x(l)| <= a (reported as a - |delta| >= 0)
std::vector<AuditViolation> lipschitz_audit(const Mesh1D& mesh);
// 2-D rules: "first" x(l1,l2) >= x(l1+a,l2) - a when l1 >= l2,
// "diagonal" x(l1,l2) >= x(l1+a,l2+a) - a, "second" x(l1,l2) >= x(l1,l2+a) - a
// when l2 >= l1.
std::vector<AuditViolation> lipschitz_audit(const Mesh2D& mesh);

struct Cell {
  std::size_t i0, i1;
  std::optional<std::size_t> j0, j1;
};

struct BracketReport {
  Rational x_min;
  Rational lower;
  Rational upper;
  Rational step;
  std::vector<std::vector<Rational>> argmin;  // every grid point attaining x_min
  std::vector<Cell> candidates;
  std::size_t cell_count = 0;                 // candidates + excluded
  // Bounding box of the candidate cells in drop-time coordinates, one
  // [lo, hi] pair per axis; empty when there are no candidates.
  std::vector<std::pair<Rational, Rational>> candidate_box;
};

// Interval [x_min - a, x_min]; cell [d_{i-1}, d_i] is a candidate when
// x(d_i) - a <= x_min.
BracketReport bracket_1d(const Mesh1D& mesh);
// Interval [x_min - 2a, x_min]; cell (i, j) is a candidate when
// (i >= j and x(d_{i+1}, d_j) <= x_min + 2a) or (j >= i and
// x(d_i, d_{j+1}) <= x_min + 2a). A needed neighbour beyond the grid keeps
// the cell as a candidate. With `guard`, the last grid line only supplies
// neighbour values: x_min and the cells cover [d_0, d_{N-1}]^2.
BracketReport bracket_2d(const Mesh2D& mesh, bool guard = false);

Json bracket_to_json(const BracketReport& report);
Json audit_to_json(const std::vector<AuditViolation>& violations);

}  // namespace rdv
