// Acceptance runner: one PASS/FAIL line per criterion, exact comparisons
// only. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "properties.hpp"
#include "rdv/evaluator.hpp"
#include "rdv/mesh_bounds.hpp"
#include "rdv/reference_bundles.hpp"
#include "rdv/repro.hpp"
#include "rdv/solver.hpp"
#include "support.hpp"

using namespace rdv;
using support::r;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Rational> times(std::initializer_list<std::int64_t> v) {
  std::vector<Rational> out;
  for (auto x : v) out.emplace_back(x);
  return out;
}

std::array<std::optional<Rational>, 4> quad(std::int64_t a, std::int64_t b, std::int64_t c,
                                            std::int64_t d) {
  return {r(a), r(b), r(c), r(d)};
}

bool within(const std::pair<Rational, Rational>& box, const Rational& lo, const Rational& hi) {
  return lo <= box.first && box.second <= hi;
}

Check no_gift() {
  Check c;
  const auto start = Clock::now();
  const SolveResult res = solve_fixed_drops(GameInstance::make(GameKind::kNoGift, r(16)));
  const double secs = seconds_since(start);
  c.require(res.value == r(26), "value " + res.value.str());
  const auto inst = GameInstance::make(GameKind::kNoGift, r(16));
  const Outcome o = evaluate_bundle(inst, no_gift_bundle(r(16)));
  c.require(o.ordered_times == times({8, 16, 32, 48}), "end times");
  c.require(secs < 1.0, "runtime");
  c.note << " value=" << res.value.str() << " ordered ends=(8,16,32,48) " << secs << "s";
  return c;
}

Check one_gift() {
  Check c;
  const auto inst = GameInstance::make(GameKind::kOneGift, r(16), std::nullopt, r(4));
  const auto start = Clock::now();
  const SolveResult res = solve_fixed_drops(inst);
  const double secs = seconds_since(start);
  c.require(res.value == r(21), "value " + res.value.str());
  const StrategyBundle ref = one_gift_bundle(r(16));
  bool found = false;
  for (const auto& b : res.optimal_bundles) found = found || support::same_play(inst, b, ref);
  c.require(found, "f=[12], g=[4;4,24] not among the optima");
  c.require(evaluate_bundle(inst, ref).ordered_times == times({12, 12, 24, 36}), "end times");
  c.require(secs < 1.0, "runtime");
  c.note << " value=" << res.value.str() << ", " << res.optimal_bundles.size()
         << " optimal bundles incl. f=[12], g=[4;4,24] " << secs << "s";
  return c;
}

Check table2_values() {
  Check c;
  const Mesh1D m = table2_mesh();
  const char* expect[] = {"21.00024", "21.00012", "21", "21.00012", "21.00024"};
  for (std::size_t i = 0; i < 5; ++i) {
    c.require(m.values[i] == Rational::parse(expect[i]),
              m.grid.point(i).decimal(5) + " -> " + m.values[i].decimal(5));
  }
  c.note << " values at 3.99968..4.00032 =";
  for (const auto& v : m.values) c.note << " " << v.decimal(5);
  return c;
}

Check table2_bracket() {
  Check c;
  const BracketReport b = bracket_1d(table2_mesh());
  c.require(b.lower == Rational::parse("20.99984") && b.upper == r(21), "interval");
  c.require(!b.candidate_box.empty() &&
                within(b.candidate_box[0], Rational::parse("3.99968"), Rational::parse("4.00016")),
            "candidate region");
  c.note << " interval=[" << b.lower.decimal(5) << ", " << b.upper.decimal(5) << "] cells in ["
         << b.candidate_box[0].first.decimal(5) << ", " << b.candidate_box[0].second.decimal(5)
         << "]";
  return c;
}

Check either_gift() {
  Check c;
  const auto inst = GameInstance::make(GameKind::kTwoGiftsOr, r(16), r(8), r(8));
  const SolveResult res = solve_fixed_drops(inst);
  c.require(res.value == r(20), "value " + res.value.str());
  bool found = false;
  for (const auto& b : res.optimal_bundles) {
    found = found || evaluate_bundle(inst, b).end_times == quad(8, 24, 24, 24);
  }
  c.require(found, "no optimum ends at (8,24,24,24)");
  c.require(evaluate_bundle(inst, or_gifts_bundle(r(16))).end_times == quad(8, 24, 24, 24),
            "reference bundle");
  const BracketReport b = bracket_2d(local_mesh_2d(GameKind::kTwoGiftsOr, r(8), 12, 12), true);
  const Rational lo = Rational::parse("7.99856"), hi = Rational::parse("8.00112");
  c.require(b.candidate_box.size() == 2 && within(b.candidate_box[0], lo, hi) &&
                within(b.candidate_box[1], lo, hi),
            "candidate box");
  c.note << " value=" << res.value.str() << " ends=(8,24,24,24); " << b.candidates.size()
         << " candidate cells within [" << b.candidate_box[0].first.decimal(5) << ", "
         << b.candidate_box[0].second.decimal(5) << "]^2";
  return c;
}

Check both_gifts() {
  Check c;
  SolveOptions o;
  o.mode = SolveMode::kValueOnly;
  for (auto [a, b] : {std::pair{0, 0}, {8, 8}, {4, 0}, {4, 2}, {4, 6}}) {
    const Rational v =
        solve_fixed_drops(GameInstance::make(GameKind::kTwoGiftsAnd, r(16), r(a), r(b)), o).value;
    c.require(v == r(24), "x(" + std::to_string(a) + "," + std::to_string(b) + ")=" + v.str());
  }
  const Rational d(16);
  c.require(evaluate_bundle(GameInstance::make(GameKind::kTwoGiftsAnd, d, r(0), r(0)),
                            and_gifts_bundle_early(d))
                    .end_times == quad(8, 40, 24, 24),
            "pair 1");
  for (std::int64_t x : {0, 2, 6}) {
    c.require(evaluate_bundle(GameInstance::make(GameKind::kTwoGiftsAnd, d, r(x), r(4)),
                              and_gifts_bundle_quarter(d))
                      .end_times == quad(16, 40, 28, 12),
              "pair 2");
  }
  c.require(evaluate_bundle(GameInstance::make(GameKind::kTwoGiftsAnd, d, r(8), r(8)),
                            and_gifts_bundle_half(d))
                    .end_times == quad(8, 24, 32, 32),
            "pair 3");
  c.note << " value 24 at (0,0) (8,8) (4,0) (4,2) (4,6); pairs end at (8,40,24,24)"
            " (16,40,28,12) (8,24,32,32)";
  return c;
}

Check table3() {
  Check c;
  // Rows by l2 = 0.00064 down to 0, columns l1 = 0 .. 0.00064, as listed.
  const char* listed[5][5] = {
      {"24.00032", "24.00040", "24.00048", "24.00056", "24.00064"},
      {"24.00024", "24.00032", "24.00040", "24.00048", "24.00056"},
      {"24.00016", "24.00024", "24.00032", "24.00040", "24.00048"},
      {"24.00008", "24.00016", "24.00024", "24.00032", "24.00040"},
      {"24", "24.00008", "20.00016", "24.00024", "24.00032"},
  };
  const Rational a = fine_step();
  const Mesh2D m = sweep_2d(make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(4) * a, a));
  int matched = 0;
  std::string odd;
  for (std::size_t row = 0; row < 5; ++row) {
    for (std::size_t i = 0; i < 5; ++i) {
      const std::size_t j = 4 - row;
      const Rational want = Rational::parse(listed[row][i]);
      const Rational got = m.at(i, j);
      if (got == want) {
        ++matched;
      } else if (i == 2 && j == 0 && got == Rational::parse("24.00016")) {
        odd = " listed 20.00016 at (0.00032, 0) computes as 24.00016 (listed value disagrees;"
              " every other cell follows 24 + (l1 + l2)/2)";
      } else {
        c.require(false, "(" + m.grid.point(i).decimal(5) + "," + m.grid.point(j).decimal(5) +
                             ") = " + got.decimal(5) + ", listed " + listed[row][i]);
      }
    }
  }
  c.require(matched >= 24, "matched cells");
  c.note << " " << matched << "/25 cells equal the listing;" << odd;
  return c;
}

Check audits() {
  Check c;
  const auto start = Clock::now();
  const Mesh1D m1 = sweep_1d(make_grid(GameKind::kOneGift, r(16), r(0), r(12), r(1, 4)));
  const Mesh2D m2 = sweep_2d(make_grid(GameKind::kTwoGiftsAnd, r(16), r(0), r(16), r(1, 2)));
  const auto v1 = lipschitz_audit(m1);
  const auto v2 = lipschitz_audit(m2);
  const double secs = seconds_since(start);
  c.require(m1.values.size() == 49 && m2.values.size() == 1089, "mesh sizes");
  c.require(v1.empty(), std::to_string(v1.size()) + " 1-D violations");
  c.require(v2.empty(), std::to_string(v2.size()) + " 2-D violations");
  c.require(secs < 600.0, "runtime");
  c.note << " 49 + 1089 solves, " << v1.size() << " + " << v2.size() << " violations, " << secs
         << "s";
  return c;
}

Check property_suite() {
  Check c;
  int cases = 0;
  auto take = [&](const char* name, const props::Tally& t) {
    cases += t.checked;
    c.require(t.ok(), std::string(name) + (t.failures.empty() ? "" : ": " + t.failures.front()));
  };
  for (GameKind kind : props::kAllKinds) {
    take("oracle equivalence", props::oracle_equivalence(kind, 9000, 100));
  }
  const props::Tally bad = props::rejects_inconsistent(20);
  c.require(bad.checked == 20, "20 inconsistent bundles");
  take("inconsistent bundles", bad);
  take("scaling", props::scaling(9100, 30));
  take("reflection", props::reflection(9200, 60));
  c.note << " " << cases << " randomized cases (100 drops per game kind, 20 inconsistent"
            " bundles, scaling by 2 and 1/4, reflection)";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"1 no-gift regression", no_gift},
      {"2 one-gift optimum", one_gift},
      {"3 one-gift fine window values", table2_values},
      {"4 one-gift bracket", table2_bracket},
      {"5 either-gift optimum and bracket", either_gift},
      {"6 both-gifts optima and fixtures", both_gifts},
      {"7 both-gifts grid near the origin", table3},
      {"8 shift-inequality audits", audits},
      {"9 property suite", property_suite},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.note << " [threw: " << e.what() << "]";
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << ":" << c.note.str() << std::endl;
    failed += c.ok ? 0 : 1;
  }
  std::cout << "SKIP 10 full-range fine meshes: excluded (about 10^6 1-D and 10^12 2-D solves);"
               " covered by 3-8"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
