#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdv/mesh_bounds.hpp"

namespace rdv {

// Regenerated tables and bracket reports. `files` maps a file name to its
// exact contents; `text` is a human-readable summary.
struct ReproOutput {
  std::map<std::string, std::string> files;
  std::string text;
};

// Step of the fine local windows: 0.00016 = 1/6250.
Rational fine_step();

// Known optima with the fine-window brackets around them (D = 16).
ReproOutput repro_table1(unsigned workers = 0);
// One-gift values at 3.99968 .. 4.00032 and their 1-D bracket.
ReproOutput repro_table2(unsigned workers = 0);
// Both-gifts-needed values on [0, 0.00064]^2.
ReproOutput repro_table3(unsigned workers = 0);
// Guarded 2-D brackets: either-gift game around (8,8); both-gifts game
// around (0,0), (4,4) and (8,8).
ReproOutput repro_exclusion(unsigned workers = 0);

// Names accepted by the CLI: table1, table2, table3, exclusion, all.
ReproOutput run_repro(const std::string& which, unsigned workers = 0);

// The local windows used above, exposed for tests.
Mesh1D table2_mesh(unsigned workers = 0);
Mesh2D local_mesh_2d(GameKind kind, const Rational& center, int steps_below, int steps_above,
                     unsigned workers = 0);

}  // namespace rdv
