#include "wallforge/error.hpp"
#include "wallforge/serialize.hpp"
#include "wallforge/version.hpp"

#include <doctest.h>

#include <cmath>

using namespace wallforge;

TEST_SUITE("serialize") {

TEST_CASE("potential specs round trip through JSON") {
  const PotentialSpec specs[] = {PotentialSpec::symmetric_cubic(2.5), PotentialSpec::quartic(3.0),
                                 PotentialSpec::general_cubic(1.0, 2.0, 2.5, 0.8)};
  for (const auto& s : specs) CHECK(potential_from_json(to_json(s)) == s);
}

TEST_CASE("potential JSON errors") {
  CHECK_THROWS_AS(potential_from_json(json{{"kind", "sextic"}}), Error);
  CHECK_THROWS_AS(potential_from_json(json{{"kind", "symmetric-cubic"}}), Error);
  try {
    potential_from_json(json{{"kind", "symmetric-cubic"}, {"gamma", 0.5}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
  }
}

TEST_CASE("localized potentials round trip") {
  const auto V = localized_potential_from_json(json{{"kind", "sech2"}, {"a", -1.5}, {"b", 2.0}, {"center", 0.25}});
  CHECK(V.amplitude() == -1.5);
  CHECK(V.center() == 0.25);
  const auto W = localized_potential_from_json(to_json(V));
  CHECK(W.value(0.4) == V.value(0.4));
  CHECK_THROWS_AS(localized_potential_from_json(json{{"kind", "sech2"}, {"a", 1.0}, {"b", -1.0}}), Error);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("report envelope carries version and hash") {
  const json e = report_envelope("solve", "0123456789abcdef", json{{"x", 1}});
  CHECK(e.at("version") == kVersion);
  CHECK(e.at("config_hash") == "0123456789abcdef");
  CHECK(e.at("command") == "solve");
  CHECK(e.at("result").at("x") == 1);
}

TEST_CASE("non-finite diagnostics serialise as null") {
  DecayFit f;
  f.rate = NAN;
  const json j = to_json(f);
  CHECK(j.at("rate").is_null());
}

}  // TEST_SUITE
