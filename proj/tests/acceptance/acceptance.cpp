// Acceptance battery: one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit status 0 iff it passes)

#include "wallforge/discretization.hpp"
#include "wallforge/dynamics.hpp"
#include "wallforge/pinning.hpp"
#include "wallforge/profile.hpp"
#include "wallforge/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

using namespace wallforge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) detail += " [FAIL]";
  pass = pass && ok;
}

Grid wall_grid(const PotentialSpec& s, int N = 4095) { return Grid::make(default_half_width(s), N); }

double exact_sup_error(const PotentialSpec& s, const RealField2& U) {
  double err = 0.0;
  for (int i = 0; i < U.grid.N; ++i) {
    const Vec2 e = exact_wall(s, U.grid.x(i));
    err = std::max({err, std::abs(U.u1[i] - e[0]), std::abs(U.u2[i] - e[1])});
  }
  return err;
}

Eigen::VectorXd stacked_derivative(const RealField2& U) {
  const RealField2 d = derivative(U);
  Eigen::VectorXd v(2 * U.grid.N);
  for (int i = 0; i < U.grid.N; ++i) {
    v[i] = d.u1[i];
    v[U.grid.N + i] = d.u2[i];
  }
  return v;
}

// 1. Exact γ = 3 solution on [−20, 20] with N = 4095.
Outcome exact_solution() {
  Outcome o;
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const auto t0 = Clock::now();
  const WallReport r = solve_wall(s, Grid::make(20.0, 4095));
  const double secs = seconds_since(t0);
  const double sup = exact_sup_error(s, r.profile);
  const double de = std::abs(r.energy - std::sqrt(2.0) / 3.0);
  o.require(sup <= 1e-6, "sup error %.3e <= 1e-6", sup);
  o.require(de <= 1e-6, "energy error %.3e <= 1e-6", de);
  o.require(secs <= 10.0, "runtime %.2fs <= 10s", secs);
  return o;
}

// 2. Centre values u₁(0).
Outcome center_values() {
  Outcome o;
  const auto s3 = PotentialSpec::symmetric_cubic(3.0);
  const WallReport r3 = solve_wall(s3, Grid::make(20.0, 4095));
  o.require(std::abs(r3.center_u1 - 0.5) <= 1e-6, "gamma=3 u1(0)=%.9f", r3.center_u1);
  for (double gamma : {1.5, 2.0, 5.0}) {
    const auto s = PotentialSpec::symmetric_cubic(gamma);
    const WallReport r = solve_wall(s, wall_grid(s));
    const double target = 1.0 / std::sqrt(1.0 + gamma);
    o.require(std::abs(r.center_u1 - target) <= 1e-3, "gamma=%g u1(0)=%.6f vs 1/sqrt(1+gamma)=%.6f (dev %.2e)",
              gamma, r.center_u1, target, r.center_u1 - target);
  }
  return o;
}

// 3. Tail decay rates √(γ−1) toward −∞ (u₁) and √2 toward +∞.
Outcome decay_rates() {
  Outcome o;
  for (double gamma : {1.5, 3.0, 5.0}) {
    const auto s = PotentialSpec::symmetric_cubic(gamma);
    const WallReport r = solve_wall(s, wall_grid(s));
    const double left = std::sqrt(gamma - 1.0), right = std::sqrt(2.0);
    const double el = std::abs(r.decay_left.rate - left) / left;
    const double er = std::abs(r.decay_right.rate - right) / right;
    o.require(el <= 0.02 && er <= 0.02, "gamma=%g left %.5f (%.2f%%) right %.5f (%.2f%%)", gamma,
              r.decay_left.rate, 100 * el, r.decay_right.rate, 100 * er);
  }
  return o;
}

// 4. Pointwise bound u₁²/a² + u₂²/b² ≤ 1 for general-cubic.
Outcome apriori_bound() {
  Outcome o;
  const double sets[5][4] = {{1.0, 1.0, 2.0, 1.0},
                             {1.0, 2.0, 2.5, 1.0},
                             {2.0, 0.5, 1.5, 1.0},
                             {1.0, 4.0, 3.0, 2.0},
                             {0.5, 0.7, 5.0, 0.5}};
  for (const auto& p : sets) {
    const auto s = PotentialSpec::general_cubic(p[0], p[1], p[2], p[3]);
    const WallReport r = solve_wall(s, wall_grid(s, 2047));
    const PropertyReport pr = verify_wall_properties(s, r);
    o.require(pr.bound_max <= 1.0 + 1e-10 && pr.nonnegative, "(%g,%g,%g,%g) max %.12f", p[0], p[1], p[2], p[3],
              pr.bound_max);
  }
  return o;
}

// 5. Zero mode, gap, positivity of L₋ and the quadratic-form identities.
Outcome spectral_structure() {
  Outcome o;
  for (double gamma : {1.5, 3.0, 5.0}) {
    const auto s = PotentialSpec::symmetric_cubic(gamma);
    const WallReport w = solve_wall(s, wall_grid(s));
    const SpectralReport r = stability_spectrum(s, w.profile);
    const double lmin = *std::min_element(r.lminus_eigs.begin(), r.lminus_eigs.end());
    o.require(std::abs(r.lplus_eigs[0]) <= 1e-4 && r.zero_mode_overlap >= 0.999 && r.gap >= 0.1 && lmin >= -1e-4,
              "gamma=%g lambda0 %.2e overlap %.6f gap %.4f min L- %.2e", gamma, r.lplus_eigs[0], r.zero_mode_overlap,
              r.gap, lmin);
  }
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const WallReport w = solve_wall(s, Grid::make(20.0, 4095));
  double worst = 0.0;
  for (std::uint64_t trial = 1; trial <= 20; ++trial) {
    const auto q = quadratic_form_identity_check(s, w.profile, TrialPair::random_bumps(trial),
                                                 TrialPair::random_bumps(500 + trial));
    worst = std::max({worst, q.lplus_defect, q.lminus_defect});
  }
  o.require(worst <= 1e-3, "quadratic forms: worst rel defect %.2e over 20 trials", worst);
  return o;
}

// 6. −λ² ≥ −1e−6 and agreement with a dense coarse-grid solve.
Outcome spectral_stability() {
  Outcome o;
  for (double gamma : {1.5, 3.0, 5.0}) {
    const auto s = PotentialSpec::symmetric_cubic(gamma);
    const WallReport w = solve_wall(s, wall_grid(s));
    const SpectralReport r = stability_spectrum(s, w.profile);
    o.require(r.neg_lambda_sq >= -1e-6, "gamma=%g -lambda^2 %.4e", gamma, r.neg_lambda_sq);

    const Grid coarse = Grid::make(12.0, 191);
    const WallReport wc = solve_wall(s, coarse);
    const SpectralReport rc = stability_spectrum(s, wc.profile);
    const DenseSpectrum d = dense_linearized_spectrum(s, wc.profile, stacked_derivative(wc.profile));
    const double dev = std::abs(d.min_value - rc.neg_lambda_sq);
    o.require(dev <= 1e-4, "gamma=%g coarse pencil %.6e dense %.6e", gamma, rc.neg_lambda_sq, d.min_value);
  }
  return o;
}

// 7. Stationary evolution and the orbital experiment over T = 50.
Outcome dynamics() {
  Outcome o;
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const auto t0 = Clock::now();
  const RealField2 wall = solve_wall(s, Grid::make(20.0, 4095)).profile;

  EvolveOptions eo;
  eo.wall = wall;
  const EvolutionTrace st = evolve(s, ComplexField2::from_real(wall), 50.0, 1e-3, {}, 0.0, eo);
  o.require(st.max_modulus_defect <= 1e-6, "stationary modulus defect %.2e", st.max_modulus_defect);
  o.require(st.energy_drift <= 1e-8, "stationary energy drift %.2e", st.energy_drift);

  const OrbitalResult orb = orbital_stability_experiment(s, wall, 1e-2, 50.0);
  o.require(orb.sup_rho <= 5e-2, "orbital sup rho %.3e <= 5e-2", orb.sup_rho);
  o.require(orb.alpha_ok, "fitted C = %.3f (|alpha| <= C eps max(1,t))", orb.fitted_C);
  const double secs = seconds_since(t0);
  o.require(secs <= 300.0, "runtime %.1fs <= 300s", secs);
  return o;
}

// 8. Pinning by V = a·sech²(bx).
Outcome pinning() {
  Outcome o;
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  const RealField2 wall = solve_wall(s, Grid::make(20.0, 4095)).profile;
  for (double b : {0.5, 1.0, 2.0}) {
    for (double a : {1.0, -1.0}) {
      const auto V = LocalizedPotential::sech2(a, b);
      const PinningPoint p = find_x0(V, wall);
      const SigmaResult sg = compute_sigma(V, p.x0, wall);
      const SigmaConsistency c = sigma_consistency(s, V, wall, first_order_correction(s, V, wall, p.x0), p.x0);
      o.require(std::abs(p.x0) <= 1e-10 && std::signbit(sg.sigma) == std::signbit(a) && c.rel_defect <= 1e-4,
                "a=%+g b=%g x0 %.1e sigma %+.6f qf defect %.1e", a, b, p.x0, sg.sigma, c.rel_defect);
    }
  }
  for (double a : {1.0, -1.0}) {
    const PinningReport r = run_pinning(s, LocalizedPotential::sech2(a, 1.0), 1e-3, wall);
    const double rel = std::abs(r.lplus_min_eig - r.predicted_shift) / std::abs(r.predicted_shift);
    const bool verdict = a > 0 ? r.verdict == Verdict::stable && r.lplus_negative_count == 0
                               : r.verdict == Verdict::unstable && r.lplus_negative_count == 1;
    o.require(std::abs(r.persistence_ratio - 2.0) <= 0.4 && rel <= 0.1 && verdict,
              "a=%+g ratio %.3f lambda_min %.4e vs %.4e (%.2f%%) negatives %d verdict %s", a, r.persistence_ratio,
              r.lplus_min_eig, r.predicted_shift, 100 * rel, r.lplus_negative_count, to_string(r.verdict).c_str());
  }
  return o;
}

// 9. Second-order self-convergence of energies and eigenvalues.
Outcome grid_refinement() {
  Outcome o;
  const auto s = PotentialSpec::symmetric_cubic(3.0);
  std::vector<double> E, lp1, lm0;
  for (int N : {1023, 2047, 4095}) {
    const WallReport w = solve_wall(s, Grid::make(20.0, N));
    SpectralOptions so;
    so.k = 4;
    const SpectralReport r = stability_spectrum(s, w.profile, so);
    E.push_back(w.energy);
    lp1.push_back(r.lplus_eigs[1]);
    lm0.push_back(r.lminus_eigs[0]);
  }
  auto ratio = [](const std::vector<double>& v) { return (v[0] - v[1]) / (v[1] - v[2]); };
  const double rE = ratio(E), rP = ratio(lp1), rM = ratio(lm0);
  o.require(std::abs(rE - 4.0) <= 0.5, "energy ratio %.3f", rE);
  o.require(std::abs(rP - 4.0) <= 0.5, "L+ lambda1 ratio %.3f", rP);
  o.require(std::abs(rM - 4.0) <= 0.5, "L- lambda0 ratio %.3f", rM);
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"exact-solution regression", exact_solution},
      {"centre values", center_values},
      {"decay rates", decay_rates},
      {"a priori bound", apriori_bound},
      {"spectral structure", spectral_structure},
      {"spectral stability", spectral_stability},
      {"dynamics", dynamics},
      {"pinning", pinning},
      {"grid refinement", grid_refinement},
  };
  return list;
}

bool run_one(std::size_t k) {
  const Criterion& c = criteria()[k];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("error: ") + e.what();
  }
  std::printf("criterion %zu (%s): %s -- %s\n", k + 1, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const long k = std::strtol(argv[2], nullptr, 10);
    if (k < 1 || k > static_cast<long>(criteria().size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", criteria().size());
      return 2;
    }
    return run_one(static_cast<std::size_t>(k - 1)) ? 0 : 1;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
    return 2;
  }
  bool all = true;
  for (std::size_t k = 0; k < criteria().size(); ++k) all = run_one(k) && all;
  return all ? 0 : 1;
}
