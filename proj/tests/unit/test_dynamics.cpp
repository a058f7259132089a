#include "wallforge/discretization.hpp"
#include "wallforge/dynamics.hpp"
#include "wallforge/error.hpp"
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
  static const RealField2 w = solve_wall(spec3(), Grid::make(20.0, 1023)).profile;
  return w;
}

ComplexField2 modulated(const RealField2& wall, double alpha, double th1, double th2) {
  return ComplexField2::from_real(translate(wall, -alpha)).gauge(th1, th2);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("cutoff is a smooth step down on [R, 2R]") {
  CHECK(cutoff(0.0, 2.0) == 1.0);
  CHECK(cutoff(-1.99, 2.0) == 1.0);
  CHECK(cutoff(4.0, 2.0) == 0.0);
  CHECK(cutoff(-7.0, 2.0) == 0.0);
  CHECK(cutoff(3.0, 2.0) == doctest::Approx(0.5));
  const double d = 1e-6;
  for (double x : {2.3, 3.1, -3.7}) {
    CHECK(cutoff_derivative(x, 2.0) == doctest::Approx((cutoff(x + d, 2.0) - cutoff(x - d, 2.0)) / (2 * d)).epsilon(1e-6));
  }
}

TEST_CASE("real wall is stationary in the co-rotating frame") {
  const ComplexField2 psi0 = ComplexField2::from_real(wall3());
  EvolveOptions o;
  o.wall = wall3();
  o.output_interval = 0.1;
  const EvolutionTrace t = evolve(spec3(), psi0, 1.0, 1e-3, {}, 0.0, o);
  CHECK(t.energy_drift <= 1e-12);
  CHECK(t.max_modulus_defect <= 1e-6);
  for (double r : t.rho) CHECK(r <= 1e-5);
  CHECK(t.steps == 1000);
}

TEST_CASE("laboratory frame rotates both components by exp(-it) for gamma = 3") {
  const ComplexField2 psi = ComplexField2::from_real(wall3());
  const double t = 0.8;
  const ComplexField2 lab = to_lab_frame(spec3(), psi, t);
  const cplx phase = std::exp(cplx(0.0, -t));
  for (int i : {0, 300, 511, 900}) {
    CHECK(std::abs(lab.psi1[i] - phase * psi.psi1[i]) < 1e-15);
    CHECK(std::abs(lab.psi2[i] - phase * psi.psi2[i]) < 1e-15);
  }
}

TEST_CASE("modulation fit recovers translation and phases") {
  const ComplexField2 psi = modulated(wall3(), 0.4, 0.3, -0.7);
  const ModulationFit f = modulation_fit(psi, wall3(), 0.0);
  CHECK(f.alpha == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(f.theta1 == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(f.theta2 == doctest::Approx(-0.7).epsilon(1e-5));
  CHECK(f.rho < 1e-4);
}

TEST_CASE("reported fit distance equals rho_A at the fitted parameters") {
  const ComplexField2 psi = perturbed_wall(wall3(), 0.02, 5);
  const ModulationFit f = modulation_fit(psi, wall3(), 0.0);
  const double direct = rho_A(psi, modulated(wall3(), f.alpha, f.theta1, f.theta2), kDefaultRhoRadius);
  CHECK(f.rho == doctest::Approx(direct).epsilon(1e-10));
  CHECK(f.rho <= 0.02 + 1e-12);
}

TEST_CASE("modulation fit is translation and gauge equivariant") {
  const ComplexField2 psi = perturbed_wall(wall3(), 0.01, 3);
  const ModulationFit f0 = modulation_fit(psi, wall3(), 0.0);
  const ComplexField2 moved = translate(psi, -0.25).gauge(0.4, -0.2);
  const ModulationFit f1 = modulation_fit(moved, wall3(), 0.0);
  const double h2 = wall3().grid.h * wall3().grid.h;
  CHECK(std::abs(f1.alpha - (f0.alpha + 0.25)) <= 10 * h2);
  CHECK(std::abs(std::remainder(f1.theta1 - f0.theta1 - 0.4, 2 * M_PI)) <= 10 * h2);
  CHECK(std::abs(std::remainder(f1.theta2 - f0.theta2 + 0.2, 2 * M_PI)) <= 10 * h2);
}

TEST_CASE("fit far from the orbit reports left_orbit") {
  ComplexField2 psi = ComplexField2::from_real(wall3());
  for (auto& z : psi.psi1) z = 0.0;
  try {
    modulation_fit(psi, wall3(), 0.0, 2.0, kDefaultRhoRadius, 1.0);
    FAIL("expected left_orbit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::left_orbit);
  }
}

TEST_CASE("perturbation has the requested rho_A size and is seeded") {
  const ComplexField2 a = perturbed_wall(wall3(), 1e-2, 1);
  const ComplexField2 b = perturbed_wall(wall3(), 1e-2, 1);
  const ComplexField2 c = perturbed_wall(wall3(), 1e-2, 2);
  const ComplexField2 w = ComplexField2::from_real(wall3());
  CHECK(rho_A(a, w, kDefaultRhoRadius) == doctest::Approx(1e-2).epsilon(1e-9));
  CHECK(a.psi1 == b.psi1);
  CHECK(a.psi1 != c.psi1);
}

TEST_CASE("localised momentum law holds along a perturbed run") {
  const ComplexField2 psi0 = perturbed_wall(wall3(), 2e-2, 4);
  EvolveOptions o;
  o.output_interval = 0.005;
  o.keep_states = true;
  const EvolutionTrace t = evolve(spec3(), psi0, 0.5, 5e-4, {}, 0.0, o);
  const double R = wall3().grid.L / 3.0;
  const MomentumReport m = momentum_drift(spec3(), t.times, t.states, R);
  CHECK(m.max_identity_defect <= 1e-3);
  // G(t) − G(0) is bounded by the time-integrated momentum.
  const double m0 = wall_mass(spec3(), wall3());
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    const double dG = (m.numerator[k] - m.numerator[0]) / m0;
    CHECK(std::abs(dG) <= std::abs(m.momentum_integral[k] / m0) + 1e-4);
  }
}

TEST_CASE("non-finite states are reported with a time stamp") {
  ComplexField2 psi = ComplexField2::from_real(wall3());
  psi.psi1[100] = cplx(NAN, 0.0);
  CHECK_THROWS_AS(evolve(spec3(), psi, 0.01, 1e-3), Error);
}

TEST_CASE("short orbital experiment stays close to the orbit") {
  OrbitalOptions o;
  o.output_interval = 0.05;
  const OrbitalResult r = orbital_stability_experiment(spec3(), wall3(), 1e-2, 1.0, o);
  CHECK(r.initial_rho == doctest::Approx(1e-2).epsilon(1e-6));
  CHECK(r.sup_rho <= 5e-2);
  CHECK(r.fitted_C <= 10.0);
  CHECK(r.pass);
}

}  // TEST_SUITE
