#include "wallforge/config.hpp"
#include "wallforge/error.hpp"

#include <doctest.h>

#include <string>

using namespace wallforge;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
    return e.what();
  }
  FAIL("expected invalid_config");
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal document takes the defaults") {
  const auto c = parse_config(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3}})");
  CHECK(c.grid.N == 4095);
  CHECK(c.solver.tol == 1e-10);
  CHECK(c.spectral.k == 8);
  CHECK(c.dynamics.T == 50.0);
  CHECK(c.pinning.eps.size() == 1);
  CHECK(c.make_grid().L > 0.0);
  CHECK(c.hash.size() == 16);
}

TEST_CASE("gamma below one cites the constraint") {
  const auto m = message_of("{\n  \"potential\": {\"kind\": \"symmetric-cubic\", \"gamma\": 0.5}\n}\n");
  CHECK(contains(m, "cfg.json:2: potential"));
  CHECK(contains(m, "gamma > 1"));
}

TEST_CASE("unknown keys are rejected with their line") {
  const std::string doc =
      "{\n"
      "  \"potential\": {\"kind\": \"symmetric-cubic\", \"gamma\": 3},\n"
      "  \"grid\": {\n"
      "    \"N\": 1023,\n"
      "    \"spacing\": 0.1\n"
      "  }\n"
      "}\n";
  CHECK(contains(message_of(doc), "cfg.json:5: grid.spacing: unknown key"));
  CHECK(contains(message_of(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3}, "extra": 1})"), "extra: unknown key"));
  CHECK(contains(message_of(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3, "g11": 1}})"), "potential.g11"));
}

TEST_CASE("ranges are enforced") {
  const std::string p = R"("potential": {"kind": "symmetric-cubic", "gamma": 3})";
  CHECK(contains(message_of("{" + p + R"(, "grid": {"N": 1024}})"), "grid.N"));
  CHECK(contains(message_of("{" + p + R"(, "grid": {"N": 7}})"), "grid.N"));
  CHECK(contains(message_of("{" + p + R"(, "spectral": {"k": 1}})"), "spectral.k"));
  CHECK(contains(message_of("{" + p + R"(, "solver": {"tol": 0}})"), "solver.tol"));
  CHECK(contains(message_of("{" + p + R"(, "dynamics": {"T": 1, "dt": 2}})"), "dynamics.dt"));
  CHECK(contains(message_of("{" + p + R"(, "pinning": {"eps": [0.1]}})"), "pinning.eps"));
  CHECK(contains(message_of("{" + p + R"(, "output": {"report": "/no/such/dir/r.json"}})"), "output.report"));
  CHECK(contains(message_of("{" + p + R"(, "grid": {"N": "many"}})"), "must be an integer"));
}

TEST_CASE("syntax errors report line and column") {
  const auto m = message_of("{\n  \"potential\": {\"kind\": \"symmetric-cubic\",}\n}\n");
  CHECK(contains(m, "cfg.json:2:"));
  CHECK(contains(m, "JSON syntax error"));
}

TEST_CASE("config hash ignores formatting and key order") {
  const auto a = parse_config(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3}, "grid": {"N": 1023, "L": 20}})");
  const auto b = parse_config("{\"grid\":{\"L\":20,\"N\":1023},\n\"potential\":{\"gamma\":3,\"kind\":\"symmetric-cubic\"}}");
  const auto c = parse_config(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3}, "grid": {"N": 2047, "L": 20}})");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
}

TEST_CASE("pinning section reads the external potential") {
  const auto c = parse_config(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3},
    "pinning": {"potential": {"kind": "sech2", "a": -2, "b": 0.5}, "eps": [1e-3, -1e-3]}})");
  CHECK(c.pinning.potential.amplitude() == -2.0);
  CHECK(c.pinning.potential.width() == 0.5);
  CHECK(c.pinning.eps == std::vector<double>{1e-3, -1e-3});
}

TEST_CASE("missing file is a config error") {
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), Error);
}

}  // TEST_SUITE
