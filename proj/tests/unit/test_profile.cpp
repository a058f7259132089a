#include "wallforge/discretization.hpp"
#include "wallforge/error.hpp"
#include "wallforge/profile.hpp"

#include <doctest.h>

#include <cmath>

using namespace wallforge;

namespace {

double sup_error_exact(const RealField2& U) {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  double err = 0.0;
  for (int i = 0; i < U.grid.N; ++i) {
    const Vec2 e = exact_wall(s, U.grid.x(i));
    err = std::max({err, std::abs(U.u1[i] - e[0]), std::abs(U.u2[i] - e[1])});
  }
  return err;
}

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("gamma = 3 solve converges to the exact wall at second order") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const WallReport coarse = solve_wall(s, Grid::make(20.0, 1023));
  const WallReport fine = solve_wall(s, Grid::make(20.0, 2047));
  CHECK(fine.residual_sup <= 1e-9);
  const double e1 = sup_error_exact(coarse.profile), e2 = sup_error_exact(fine.profile);
  CHECK(e2 < 1e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(fine.center_u1 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fine.symmetric_defect <= 1e-8);
  CHECK(std::abs(fine.center) < 1e-9);
  CHECK(fine.monotone[0]);
  CHECK(fine.monotone[1]);
  // Energy √2/3 at second order.
  CHECK(std::abs(fine.energy - std::sqrt(2.0) / 3.0) < 5e-6);
}

TEST_CASE("decay rates follow the Hessian at the wells") {
  const auto s = PotentialSpec::symmetric_cubic(5.0);
  const WallReport r = solve_wall(s, Grid::make(default_half_width(s), 4095));
  CHECK(r.decay_left.predicted == doctest::Approx(2.0));   // √(γ−1)
  CHECK(r.decay_right.predicted == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(r.decay_left.rel_error()) <= 0.02);
  CHECK(std::abs(r.decay_right.rel_error()) <= 0.02);
}

TEST_CASE("energy is translation invariant") {
  const auto s = PotentialSpec::symmetric_cubic(2.0);
  const Grid g = Grid::make(default_half_width(s), 2047);
  SolveOptions shifted;
  shifted.guess_shift = 0.7;
  const double e0 = solve_wall(s, g).energy;
  const double e1 = solve_wall(s, g, shifted).energy;
  CHECK(std::abs(e0 - e1) <= 1e-8);
}

TEST_CASE("general-cubic walls respect the pointwise bound") {
  const PotentialSpec specs[] = {PotentialSpec::general_cubic(1.0, 2.0, 2.5, 1.0),
                                 PotentialSpec::general_cubic(2.0, 0.5, 1.5, 1.0)};
  for (const auto& s : specs) {
    const WallReport r = solve_wall(s, Grid::make(default_half_width(s), 2047));
    const PropertyReport p = verify_wall_properties(s, r);
    CHECK(r.residual_sup <= 1e-9);
    CHECK(p.nonnegative);
    CHECK(p.bound_ok);
    CHECK(p.bound_max <= 1.0 + 1e-10);
  }
}

TEST_CASE("converged wall is a local energy minimum") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const WallReport r = solve_wall(s, Grid::make(20.0, 511));
  const double E = energy(s, r.profile);
  for (int k = 1; k <= 20; ++k) {
    RealField2 P = r.profile;
    double norm = 0.0;
    std::vector<double> b1(P.grid.N), b2(P.grid.N);
    for (int i = 0; i < P.grid.N; ++i) {
      const double x = P.grid.x(i);
      b1[i] = std::exp(-std::pow(x - 0.3 * k + 3, 2)) * std::sin(k * x);
      b2[i] = std::exp(-std::pow(x + 0.2 * k - 2, 2)) * std::cos(0.5 * k * x);
      norm += P.grid.h * (b1[i] * b1[i] + b2[i] * b2[i]);
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < P.grid.N; ++i) {
      P.u1[i] += 1e-3 * b1[i] / norm;
      P.u2[i] += 1e-3 * b2[i] / norm;
    }
    CHECK(energy(s, P) >= E - 1e-10);
  }
}

TEST_CASE("centre normalisation moves the crossing to the origin") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const Grid g = Grid::make(20.0, 1023);
  const RealField2 U = RealField2::sample(g, s.b_state(), s.a_state(), [&](double x) { return exact_wall(s, x - 1.3); });
  CHECK(crossing_position(U) == doctest::Approx(1.3).epsilon(1e-6));
  const CenterResult c = normalize_center(s, U);
  CHECK(c.shift == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(std::abs(crossing_position(c.profile)) < 1e-6);
  // Symmetric wall: the mass centre coincides with the crossing.
  CHECK(std::abs(c.mass_shift) < 1e-6);
}

TEST_CASE("gradient flow refuses unstable steps") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const Grid g = Grid::make(20.0, 255);
  const RealField2 U0 = initial_guess(s, g);
  CHECK_THROWS_AS(gradient_flow(s, U0, g.h * g.h, 10), Error);
  const FlowResult f = gradient_flow(s, U0, 0.2 * g.h * g.h, 50, true);
  for (std::size_t i = 1; i < f.energies.size(); ++i) CHECK(f.energies[i] <= f.energies[i - 1] + 1e-15);
}

}  // TEST_SUITE
