#include "wallforge/error.hpp"
#include "wallforge/pinning.hpp"
#include "wallforge/profile.hpp"

#include <doctest.h>

#include <cmath>

using namespace wallforge;

namespace {

const PotentialSpec& spec3() {
  static const PotentialSpec s = PotentialSpec::symmetric_cubic(3.0);
  return s;
}

const RealField2& wall3() {
  static const RealField2 w = solve_wall(spec3(), Grid::make(20.0, 2047)).profile;
  return w;
}

// σ = ½∫V″(x)(u₁² + u₂² − 1)dx for V = sech²(bx) on the exact γ = 3 wall,
// evaluated by adaptive quadrature at 30 digits.
constexpr double kSigmaB05 = 0.148506590930508148;
constexpr double kSigmaB1 = 0.210020034995717897;
constexpr double kSigmaB2 = 0.182397587088426230;
// ‖U′‖² of the exact wall, √2/3.
constexpr double kUprimeSq = 0.471404520791031683;

}  // namespace

TEST_SUITE("pinning") {

TEST_CASE("sech2 derivatives match finite differences") {
  const auto V = LocalizedPotential::sech2(-0.8, 1.7, 0.3);
  const double d = 1e-5;
  for (double x : {-2.0, 0.0, 0.3, 1.1}) {
    CHECK(V.d1(x) == doctest::Approx((V.value(x + d) - V.value(x - d)) / (2 * d)).epsilon(1e-8));
    CHECK(V.d2(x) == doctest::Approx((V.d1(x + d) - V.d1(x - d)) / (2 * d)).epsilon(1e-7));
  }
  CHECK(V.value(0.3) == doctest::Approx(-0.8));
  CHECK(V.scaled(2.0).value(0.3) == doctest::Approx(-1.6));
  CHECK(V.shifted(1.0).value(1.3) == doctest::Approx(-0.8));
}

TEST_CASE("pinning point of a centred potential is the origin") {
  for (double b : {0.5, 1.0, 2.0}) {
    for (double a : {1.0, -1.0}) {
      const PinningPoint p = find_x0(LocalizedPotential::sech2(a, b), wall3());
      CHECK(std::abs(p.x0) <= 1e-10);
    }
  }
}

TEST_CASE("translated potential pins the wall at its centre") {
  const PinningPoint p = find_x0(LocalizedPotential::sech2(1.0, 1.0, -0.7), wall3());
  CHECK(p.x0 == doctest::Approx(-0.7).epsilon(1e-7));
  const SigmaResult s = compute_sigma(LocalizedPotential::sech2(1.0, 1.0, -0.7), p.x0, wall3());
  CHECK(s.sigma == doctest::Approx(kSigmaB1).epsilon(1e-4));
}

TEST_CASE("stability index matches the quadrature oracle") {
  const double expected[] = {kSigmaB05, kSigmaB1, kSigmaB2};
  const double widths[] = {0.5, 1.0, 2.0};
  for (int k = 0; k < 3; ++k) {
    const SigmaResult s = compute_sigma(LocalizedPotential::sech2(1.0, widths[k]), 0.0, wall3());
    CHECK(s.sigma == doctest::Approx(expected[k]).epsilon(1e-4));
    CHECK(s.rel_defect <= 1e-8);
    const SigmaResult n = compute_sigma(LocalizedPotential::sech2(-1.0, widths[k]), 0.0, wall3());
    CHECK(n.sigma == doctest::Approx(-expected[k]).epsilon(1e-4));
  }
  CHECK(uprime_norm_sq(wall3()) == doctest::Approx(kUprimeSq).epsilon(1e-5));
}

TEST_CASE("sigma from the quadratic form agrees with the V'' formula") {
  const auto V = LocalizedPotential::sech2(1.0, 1.0);
  const RealField2 W = first_order_correction(spec3(), V, wall3());
  const SigmaConsistency c = sigma_consistency(spec3(), V, wall3(), W);
  CHECK(c.rel_defect <= 1e-4);
}

TEST_CASE("degenerate and unsupported inputs are refused") {
  CHECK_THROWS_AS(find_x0(LocalizedPotential::zero(), wall3()), Error);
  try {
    find_x0(LocalizedPotential::zero(), wall3());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
  const auto V = LocalizedPotential::sech2(1.0, 1.0);
  CHECK_THROWS_AS(solve_pinned_wall(spec3(), V, 0.2, wall3(), 0.0), Error);
  const auto g = PotentialSpec::general_cubic(1.0, 2.0, 2.5, 1.0);
  const RealField2 wg = solve_wall(g, Grid::make(default_half_width(g), 511)).profile;
  try {
    run_pinning(g, V, 1e-3, wg);
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported);
  }
}

TEST_CASE("tabulated potential reproduces the closed form") {
  std::vector<double> x, v, dv, d2v;
  const auto S = LocalizedPotential::sech2(1.0, 1.0);
  for (int i = 0; i <= 4000; ++i) {
    const double t = -20.0 + 0.01 * i;
    x.push_back(t);
    v.push_back(S.value(t));
    dv.push_back(S.d1(t));
    d2v.push_back(S.d2(t));
  }
  const auto T = LocalizedPotential::tabulated(x, v, dv, d2v);
  CHECK_FALSE(T.derivatives_from_spline());
  CHECK(compute_sigma(T, 0.0, wall3()).sigma == doctest::Approx(kSigmaB1).epsilon(1e-4));
  const auto Ts = LocalizedPotential::tabulated(x, v);
  CHECK(Ts.derivatives_from_spline());
  CHECK(compute_sigma(Ts, 0.0, wall3()).sigma == doctest::Approx(kSigmaB1).epsilon(1e-3));
}

TEST_CASE("pinned wall: persistence, symmetry and spectrum") {
  const double eps = 1e-3;
  const double predicted = eps * kSigmaB1 / kUprimeSq;
  const PinningReport up = run_pinning(spec3(), LocalizedPotential::sech2(1.0, 1.0), eps, wall3());
  CHECK(up.residual_sup <= 1e-9);
  CHECK(up.persistence_ratio == doctest::Approx(2.0).epsilon(0.2));
  CHECK(up.symmetric_defect <= 1e-8);
  CHECK(up.lplus_min_eig == doctest::Approx(predicted).epsilon(0.1));
  CHECK(up.lplus_negative_count == 0);
  CHECK(up.verdict == Verdict::stable);

  const PinningReport down = run_pinning(spec3(), LocalizedPotential::sech2(-1.0, 1.0), eps, wall3());
  CHECK(down.lplus_min_eig == doctest::Approx(-predicted).epsilon(0.1));
  CHECK(down.lplus_negative_count == 1);
  CHECK(down.verdict == Verdict::unstable);
}

}  // TEST_SUITE
