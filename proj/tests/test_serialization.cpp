#include <doctest.h>

#include "rdv/errors.hpp"
#include "rdv/reference_bundles.hpp"
#include "rdv/serialization.hpp"

using namespace rdv;

TEST_CASE("rationals serialize as p/q") {
  CHECK(rational_to_json(Rational(21)) == Json("21/1"));
  CHECK(rational_from_json(Json("1/6250")) == Rational(1, 6250));
  CHECK(rational_from_json(Json("0.5")) == Rational(1, 2));
}

TEST_CASE("bundles round-trip through JSON") {
  for (const auto& b : {no_gift_bundle(Rational(16)), one_gift_bundle(Rational(16)),
                        and_gifts_bundle_half(Rational(16)), and_gifts_bundle_quarter(Rational(7, 3))}) {
    const Json j = bundle_to_json(b);
    CHECK(bundle_from_json(j) == b);
    CHECK(bundle_key(bundle_from_json(Json::parse(j.dump()))) == bundle_key(b));
  }
}

TEST_CASE("malformed bundles are reported") {
  CHECK_THROWS_AS(bundle_from_json(Json::parse(R"({"I": 3})")), Error);
  CHECK_THROWS_AS(node_from_json(Json::parse(R"({"t": "0/1", "obs": "BOGUS", "x": "0/1", "dir": 1})")),
                  Error);
}

TEST_CASE("outcome JSON lists scenario and ordered times") {
  Outcome o = make_outcome({Rational(8), Rational(48), Rational(32), Rational(16)});
  const Json j = outcome_to_json(o);
  CHECK(j.at("value") == Json("26/1"));
  CHECK(j.at("ordered_times").at(1) == Json("16/1"));
  CHECK(j.at("end_times").at(1) == Json("48/1"));
}
