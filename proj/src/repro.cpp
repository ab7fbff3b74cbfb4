#include "rdv/repro.hpp"

#include <sstream>

#include "rdv/errors.hpp"
#include "rdv/solver.hpp"

namespace rdv {

namespace {

const Rational kD(16);

// Decimal text without trailing zeros ("21", "20.99984").
std::string trimmed(const Rational& r) {
  std::string s = r.decimal(15);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string interval_text(const BracketReport& r) {
  return "[" + trimmed(r.lower) + ", " + trimmed(r.upper) + "]";
}

Json interval_json(const Rational& lo, const Rational& hi) {
  return Json::array({rational_to_json(lo), rational_to_json(hi)});
}

SweepOptions sweep_options(unsigned workers) {
  SweepOptions o;
  o.workers = workers;
  return o;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Window {
  std::string name;
  GameKind kind;
  Rational center;
  int below;
  int above;
};

const std::vector<Window>& exclusion_windows() {
  static const std::vector<Window> w = {
      {"g2or_8_8", GameKind::kTwoGiftsOr, Rational(8), 12, 12},
      {"g2and_0_0", GameKind::kTwoGiftsAnd, Rational(0), 0, 5},
      {"g2and_4_4", GameKind::kTwoGiftsAnd, Rational(4), 12, 12},
      {"g2and_8_8", GameKind::kTwoGiftsAnd, Rational(8), 12, 12},
  };
  return w;
}

Json window_json(const Window& w, const Mesh2D& mesh, const BracketReport& r) {
  Json j;
  j["game"] = std::string(to_string(w.kind));
  j["D"] = rational_to_json(kD);
  j["grid"] = interval_json(mesh.grid.lo, mesh.grid.hi);
  j["step"] = rational_to_json(mesh.grid.step);
  j["guard"] = true;
  j["report"] = bracket_to_json(r);
  return j;
}

}  // namespace

Rational fine_step() { return Rational(1, 6250); }

Mesh1D table2_mesh(unsigned workers) {
  const Rational a = fine_step();
  return sweep_1d(make_grid(GameKind::kOneGift, kD, Rational(4) - Rational(2) * a,
                            Rational(4) + Rational(2) * a, a),
                  sweep_options(workers));
}

Mesh2D local_mesh_2d(GameKind kind, const Rational& center, int below, int above,
                     unsigned workers) {
  const Rational a = fine_step();
  return sweep_2d(make_grid(kind, kD, center - Rational(below) * a, center + Rational(above) * a, a),
                  sweep_options(workers));
}

ReproOutput repro_table2(unsigned workers) {
  Mesh1D mesh = table2_mesh(workers);
  BracketReport r = bracket_1d(mesh);
  ReproOutput out;
  out.files["table2.csv"] = mesh_csv(mesh);
  out.files["table2_bracket.json"] = dump(bracket_to_json(r));
  std::ostringstream t;
  t << "one-gift game, D = 16, value by drop time\n";
  for (std::size_t i = 0; i < mesh.values.size(); ++i) {
    t << "  " << trimmed(mesh.grid.point(i)) << "  " << trimmed(mesh.values[i]) << "\n";
  }
  t << "value interval " << interval_text(r) << ", drop time in ["
    << trimmed(r.candidate_box[0].first) << ", " << trimmed(r.candidate_box[0].second) << "]\n";
  out.text = t.str();
  return out;
}

ReproOutput repro_table3(unsigned workers) {
  const Rational a = fine_step();
  Mesh2D mesh = sweep_2d(make_grid(GameKind::kTwoGiftsAnd, kD, Rational(0), Rational(4) * a, a),
                         sweep_options(workers));
  ReproOutput out;
  out.files["table3.csv"] = mesh_csv(mesh);
  std::ostringstream t;
  const std::size_t n = mesh.grid.size();
  t << "both-gifts game, D = 16; rows tau2 (descending), columns tau1\n";
  for (std::size_t j = n; j-- > 0;) {
    t << "  " << trimmed(mesh.grid.point(j)) << "\t|";
    for (std::size_t i = 0; i < n; ++i) t << " " << trimmed(mesh.at(i, j));
    t << "\n";
  }
  t << "  \t|";
  for (std::size_t i = 0; i < n; ++i) t << " " << trimmed(mesh.grid.point(i));
  t << "\n";
  out.text = t.str();
  return out;
}

ReproOutput repro_exclusion(unsigned workers) {
  ReproOutput out;
  std::ostringstream t;
  for (const auto& w : exclusion_windows()) {
    Mesh2D mesh = local_mesh_2d(w.kind, w.center, w.below, w.above, workers);
    BracketReport r = bracket_2d(mesh, true);
    out.files["exclusion_" + w.name + ".json"] = dump(window_json(w, mesh, r));
    t << to_string(w.kind) << " around (" << trimmed(w.center) << "," << trimmed(w.center)
      << "): x_min " << trimmed(r.x_min) << ", interval " << interval_text(r) << ", "
      << r.candidates.size() << " of " << r.cell_count << " cells remain, within ["
      << trimmed(r.candidate_box[0].first) << ", " << trimmed(r.candidate_box[0].second)
      << "] x [" << trimmed(r.candidate_box[1].first) << ", "
      << trimmed(r.candidate_box[1].second) << "]\n";
  }
  out.text = t.str();
  return out;
}

ReproOutput repro_table1(unsigned workers) {
  Json rows = Json::array();
  std::ostringstream t;
  t << "game   drop times                value\n";

  {
    SolveOptions o;
    o.mode = SolveMode::kValueOnly;
    const Rational v = solve_fixed_drops(GameInstance::make(GameKind::kNoGift, kD), o).value;
    Json row;
    row["game"] = "g";
    row["drop_times"] = Json();
    row["value"] = rational_to_json(v);
    rows.push_back(row);
    t << "g      -                         " << trimmed(v) << "\n";
  }
  {
    BracketReport r = bracket_1d(table2_mesh(workers));
    Json row;
    row["game"] = "g1";
    Json drops = Json::array();
    for (const auto& p : r.argmin) drops.push_back(rational_to_json(p[0]));
    row["drop_times"] = drops;
    row["interval"] = interval_json(r.lower, r.upper);
    rows.push_back(row);
    std::string d;
    for (const auto& p : r.argmin) d += trimmed(p[0]) + " ";
    d.resize(26, ' ');
    t << "g1     " << d << interval_text(r) << "\n";
  }

  // The two-gift rows collect the argmins of the guarded local windows.
  for (GameKind kind : {GameKind::kTwoGiftsOr, GameKind::kTwoGiftsAnd}) {
    Json drops = Json::array();
    std::string d;
    std::optional<Rational> best;
    Rational lo, hi;
    for (const auto& w : exclusion_windows()) {
      if (w.kind != kind) continue;
      Mesh2D mesh = local_mesh_2d(w.kind, w.center, w.below, w.above, workers);
      BracketReport r = bracket_2d(mesh, true);
      if (best && r.x_min > *best) continue;
      if (!best || r.x_min < *best) {
        drops = Json::array();
        d.clear();
        best = r.x_min;
        lo = r.lower;
        hi = r.upper;
      }
      // A whole grid line of minima is reported as a stripe.
      const std::size_t m = mesh.grid.size() - 1;
      auto line_is_min = [&](std::size_t k, bool first) {
        for (std::size_t u = 0; u < m; ++u) {
          if ((first ? mesh.at(k, u) : mesh.at(u, k)) != r.x_min) return false;
        }
        return true;
      };
      std::vector<std::pair<std::string, std::string>> found;
      for (std::size_t k = 0; k < m && m > 1; ++k) {
        if (line_is_min(k, true)) found.push_back({mesh.grid.point(k).str(), "x"});
        if (line_is_min(k, false)) found.push_back({"x", mesh.grid.point(k).str()});
      }
      if (found.empty()) {
        for (const auto& p : r.argmin) found.push_back({p[0].str(), p[1].str()});
      }
      for (const auto& [x, y] : found) {
        drops.push_back(Json::array({x, y}));
        auto show = [](const std::string& s) {
          return s == "x" ? s : trimmed(Rational::parse(s));
        };
        d += "(" + show(x) + "," + show(y) + ") ";
      }
    }
    if (!best) throw ModelError("no window for " + std::string(to_string(kind)));
    Json row;
    row["game"] = std::string(to_string(kind));
    row["drop_times"] = drops;
    row["interval"] = interval_json(lo, hi);
    rows.push_back(row);
    d.resize(std::max<std::size_t>(d.size(), 26), ' ');
    std::string name(to_string(kind));
    name.resize(7, ' ');
    t << name << d << "[" << trimmed(lo) << ", " << trimmed(hi) << "]\n";
  }

  ReproOutput out;
  Json j;
  j["D"] = rational_to_json(kD);
  j["step"] = rational_to_json(fine_step());
  j["rows"] = rows;
  out.files["table1.json"] = dump(j);
  out.text = t.str();
  return out;
}

ReproOutput run_repro(const std::string& which, unsigned workers) {
  if (which == "table1") return repro_table1(workers);
  if (which == "table2") return repro_table2(workers);
  if (which == "table3") return repro_table3(workers);
  if (which == "exclusion") return repro_exclusion(workers);
  if (which == "all") {
    ReproOutput all;
    for (const char* part : {"table1", "table2", "table3", "exclusion"}) {
      ReproOutput o = run_repro(part, workers);
      all.files.insert(o.files.begin(), o.files.end());
      all.text += "== " + std::string(part) + "\n" + o.text;
    }
    return all;
  }
  throw ConfigError("unknown repro target '" + which +
                    "' (expected table1, table2, table3, exclusion or all)");
}

}  // namespace rdv
