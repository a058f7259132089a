#include "wallforge/error.hpp"
#include "wallforge/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wallforge;

namespace {

std::vector<PotentialSpec> family() {
  return {PotentialSpec::symmetric_cubic(1.5), PotentialSpec::symmetric_cubic(3.0),
          PotentialSpec::general_cubic(1.0, 2.0, 2.5, 1.0), PotentialSpec::quartic(2.0)};
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("parameter constraints are enforced") {
  CHECK_THROWS_AS(PotentialSpec::symmetric_cubic(0.5), Error);
  CHECK_THROWS_AS(PotentialSpec::symmetric_cubic(1.0), Error);
  CHECK_THROWS_AS(PotentialSpec::quartic(1.0), Error);
  CHECK_THROWS_AS(PotentialSpec::general_cubic(1.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(PotentialSpec::general_cubic(-1.0, 1.0, 3.0, 1.0), Error);
  CHECK_THROWS_AS(PotentialSpec::symmetric_cubic(NAN), Error);
  try {
    PotentialSpec::symmetric_cubic(0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
    CHECK(std::string(e.what()).find("gamma > 1") != std::string::npos);
  }
}

TEST_CASE("wells are zeros of W") {
  for (const auto& s : family()) {
    CHECK(eval_W(s, s.a_state()) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(eval_W(s, s.b_state()) == doctest::Approx(0.0).epsilon(1e-14));
    const Vec2 ga = grad_W(s, s.a_state()), gb = grad_W(s, s.b_state());
    CHECK(std::abs(ga[0]) + std::abs(ga[1]) < 1e-13);
    CHECK(std::abs(gb[0]) + std::abs(gb[1]) < 1e-13);
  }
}

TEST_CASE("general-cubic wells sit at sqrt(mu) / g^(1/4)") {
  const auto s = PotentialSpec::general_cubic(2.0, 0.5, 1.5, 1.0);
  CHECK(s.a_state()[0] == doctest::Approx(std::pow(2.0, -0.25)));
  CHECK(s.b_state()[1] == doctest::Approx(std::pow(0.5, -0.25)));
}

TEST_CASE("derivatives agree with finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.05, 1.2);
  const double d = 1e-5;
  for (const auto& s : family()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec2 p{U(rng), U(rng)};
      const Vec2 g = grad_W(s, p);
      const Mat2 H = hess_W(s, p);
      const Tensor3 T = third_W(s, p);
      for (int i = 0; i < 2; ++i) {
        Vec2 pp = p, pm = p;
        pp[i] += d;
        pm[i] -= d;
        CHECK(g[i] == doctest::Approx((eval_W(s, pp) - eval_W(s, pm)) / (2 * d)).epsilon(1e-7));
        const Vec2 gp = grad_W(s, pp), gm = grad_W(s, pm);
        const Mat2 Hp = hess_W(s, pp), Hm = hess_W(s, pm);
        for (int j = 0; j < 2; ++j) {
          CHECK(H[i][j] == doctest::Approx((gp[j] - gm[j]) / (2 * d)).epsilon(1e-6));
          for (int k = 0; k < 2; ++k) {
            CHECK(T[i][j][k] == doctest::Approx((Hp[j][k] - Hm[j][k]) / (2 * d)).epsilon(1e-6));
          }
        }
      }
    }
  }
}

TEST_CASE("exact gamma = 3 wall solves the stationary equation") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  CHECK(s.is_exact_gamma3());
  const double d = 1e-4;
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
    const Vec2 u = exact_wall(s, x), up = exact_wall(s, x + d), um = exact_wall(s, x - d);
    const Vec2 g = grad_W(s, u);
    for (int j = 0; j < 2; ++j) {
      const double upp = (up[j] - 2 * u[j] + um[j]) / (d * d);
      CHECK(std::abs(-upp + 0.5 * g[j]) < 1e-6);
    }
  }
  CHECK(exact_wall(s, 0.0)[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(exact_wall(PotentialSpec::symmetric_cubic(2.0), 0.0), Error);
}

TEST_CASE("axiom checks pass for admissible cubic potentials") {
  for (double gamma : {1.5, 3.0, 5.0}) {
    const auto rep = check_W_axioms(PotentialSpec::symmetric_cubic(gamma), SampleBox{}, 2000);
    CHECK(rep.passed());
    CHECK(rep.min_W >= -1e-14);
    CHECK(rep.w5_closed_form_nonneg);
  }
  CHECK(check_W_axioms(PotentialSpec::general_cubic(1.0, 2.0, 2.5, 1.0), SampleBox{}, 2000).passed());
}

TEST_CASE("axiom report is reproducible for a fixed seed") {
  const auto s = PotentialSpec::symmetric_cubic(2.0);
  const auto a = check_W_axioms(s, SampleBox{}, 500, 42);
  const auto b = check_W_axioms(s, SampleBox{}, 500, 42);
  CHECK(a.min_W == b.min_W);
  CHECK(a.w5_min == b.w5_min);
}

TEST_CASE("kind names round trip") {
  for (auto k : {PotentialKind::symmetric_cubic, PotentialKind::general_cubic, PotentialKind::quartic}) {
    CHECK(potential_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(potential_kind_from_string("sextic"), Error);
}

}  // TEST_SUITE
