#include "wallforge/discretization.hpp"
#include "wallforge/profile.hpp"
#include "wallforge/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace wallforge;

namespace {

Eigen::VectorXd stacked_derivative(const RealField2& U) {
  const RealField2 d = derivative(U);
  Eigen::VectorXd v(2 * U.grid.N);
  for (int i = 0; i < U.grid.N; ++i) {
    v[i] = d.u1[i];
    v[U.grid.N + i] = d.u2[i];
  }
  return v;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("essential edge is min(gamma - 1, 2) for symmetric-cubic") {
  CHECK(essential_edge(PotentialSpec::symmetric_cubic(1.5)) == doctest::Approx(0.5));
  CHECK(essential_edge(PotentialSpec::symmetric_cubic(3.0)) == doctest::Approx(2.0));
  CHECK(essential_edge(PotentialSpec::symmetric_cubic(5.0)) == doctest::Approx(2.0));
}

TEST_CASE("gamma = 3 wall: zero mode, gap, positive L-, stability") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const WallReport w = solve_wall(s, Grid::make(20.0, 2047));
  const SpectralReport r = stability_spectrum(s, w.profile);
  REQUIRE(r.lplus_eigs.size() >= 2);
  CHECK(std::abs(r.lplus_eigs[0]) <= 1e-4);
  CHECK(r.zero_mode_overlap >= 0.999);
  CHECK(r.ground_state_signed);
  CHECK(r.gap >= 0.1);
  CHECK(r.lplus_uprime_residual <= 1e-3);
  CHECK(*std::min_element(r.lminus_eigs.begin(), r.lminus_eigs.end()) >= -1e-4);
  CHECK(r.neg_lambda_sq >= -1e-6);
  CHECK(r.verdict == Verdict::stable);
  CHECK(r.denominator_min > 0.0);
  CHECK(std::is_sorted(r.lplus_eigs.begin(), r.lplus_eigs.end()));
  for (double res : r.lplus_residuals) CHECK(res <= 1e-8);
}

TEST_CASE("quadratic form identities hold on random trials") {
  const auto s = PotentialSpec::symmetric_cubic(2.0);
  const WallReport w = solve_wall(s, Grid::make(default_half_width(s), 4095));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto q = quadratic_form_identity_check(s, w.profile, TrialPair::random_bumps(seed),
                                                 TrialPair::random_bumps(1000 + seed));
    CHECK(q.lplus_defect <= 1e-3);
    CHECK(q.lminus_defect <= 1e-3);
  }
  // Constant B: Φ_I is the gauge mode, so ⟨L₋Φ_I, Φ_I⟩ = 0.
  const auto q = quadratic_form_identity_check(s, w.profile, TrialPair::constant(1.0, 1.0),
                                               TrialPair::constant(1.0, 0.0));
  CHECK(q.lminus_identity == doctest::Approx(0.0));
  CHECK(std::abs(q.lminus_direct) <= 1e-3 * q.lminus_scale);
}

TEST_CASE("pencil minimum agrees with the dense linearised spectrum") {
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const WallReport w = solve_wall(s, Grid::make(12.0, 191));
  const SpectralReport r = stability_spectrum(s, w.profile);
  const DenseSpectrum d = dense_linearized_spectrum(s, w.profile, stacked_derivative(w.profile));
  CHECK(std::abs(d.translation_value) <= 1e-6);
  CHECK(d.min_value == doctest::Approx(r.neg_lambda_sq).epsilon(1e-4));
}

TEST_CASE("min_pencil solves a diagonal pencil") {
  const int n = 40;
  Eigen::VectorXd a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = 1.0 + i;
    b[i] = 2.0;
  }
  auto A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a.cwiseProduct(x); };
  auto B = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return b.cwiseProduct(x); };
  auto P = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseQuotient(a); };
  auto I = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  const PencilResult r = min_pencil(A, B, P, I, Eigen::VectorXd::Ones(n));
  CHECK(r.value == doctest::Approx(0.5));
}

TEST_CASE("stability verdicts for other gammas") {
  for (double gamma : {1.5, 5.0}) {
    const auto s = PotentialSpec::symmetric_cubic(gamma);
    const WallReport w = solve_wall(s, Grid::make(default_half_width(s), 2047));
    const SpectralReport r = stability_spectrum(s, w.profile);
    CHECK(r.gap >= 0.1);
    CHECK(r.neg_lambda_sq >= -1e-6);
  }
}

}  // TEST_SUITE
