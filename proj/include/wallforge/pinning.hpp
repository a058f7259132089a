#pragma once

#include "wallforge/discretization.hpp"
#include "wallforge/spectral.hpp"

#include <string>
#include <vector>

namespace wallforge {

/// External potential V with its first two derivatives.
///
/// The closed-form family is V(x) = a·sech²(b(x − c)). Tabulated potentials
/// are interpolated by a natural cubic spline (zero outside the table); when
/// V′ and V″ are not supplied they are taken from the spline, which is only
/// second-order accurate in V″ — `derivatives_from_spline()` flags this.
class LocalizedPotential {
public:
  static LocalizedPotential sech2(double a, double b, double center = 0.0);
  static LocalizedPotential tabulated(std::vector<double> x, std::vector<double> v,
                                      std::vector<double> dv = {}, std::vector<double> d2v = {});
  static LocalizedPotential zero();

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  std::vector<double> sample(const Grid& g, double shift = 0.0) const;  // V(xᵢ + shift)

  /// Scales (V → s·V) and translates (V(x) → V(x − c)).
  LocalizedPotential scaled(double s) const;
  LocalizedPotential shifted(double c) const;

  bool is_sech2() const noexcept { return kind_ == Kind::sech2; }
  bool derivatives_from_spline() const noexcept { return spline_derivatives_; }
  double amplitude() const noexcept { return a_; }
  double width() const noexcept { return b_; }
  double center() const noexcept { return c_; }
  std::string describe() const;

  /// Checks V, V′, V″ are finite on the grid and |V| ≤ 1e−10 at |x| ≥ L.
  /// Returns warnings (integrability of tabulated data cannot be certified).
  std::vector<std::string> check(const Grid& g) const;

private:
  enum class Kind { sech2, tabulated };
  struct Spline {
    std::vector<double> x, y, m;  // knots, values, second derivatives
    double eval(double t, int order) const;
  };

  Kind kind_ = Kind::sech2;
  double a_ = 0.0, b_ = 1.0, c_ = 0.0, scale_ = 1.0;
  Spline v_, dv_, d2v_;
  bool has_dv_ = false, has_d2v_ = false, spline_derivatives_ = false;
};

struct PinningPoint {
  double x0 = 0.0;
  double residual = 0.0;            // |f(x₀)|
  std::vector<double> other_roots;  // further sign changes on the scan interval
};

/// Root of f(s) = ∫V′(x + s)(u₁² + u₂² − a²)dx nearest to 0 on [−L/2, L/2]:
/// 64 bracketing intervals, then safeguarded secant steps to |f| ≤ 1e−10.
/// Throws Error{degenerate} if f vanishes identically and
/// Error{no_pinning_point} if it has no sign change.
PinningPoint find_x0(const LocalizedPotential& V, const RealField2& wall0);
double pinning_function(const LocalizedPotential& V, const RealField2& wall0, double s);

struct SigmaResult {
  double sigma = 0.0;       // ½∫V″(x + x₀)(u₁² + u₂² − a²)dx
  double sigma_ibp = 0.0;   // −∫V′(x + x₀)(u₁u₁′ + u₂u₂′)dx
  double rel_defect = 0.0;
};

/// Stability index. Throws Error{marginal} when |σ| < 1e−10.
SigmaResult compute_sigma(const LocalizedPotential& V, double x0, const RealField2& wall0);

/// W with L₊W = −V(· + x₀)U₀ − m·U₀′, ⟨U₀′, W⟩ = 0 (bordered solve).
RealField2 first_order_correction(const PotentialSpec& spec, const LocalizedPotential& V,
                                  const RealField2& wall0, double x0 = 0.0);

struct SigmaConsistency {
  double sigma_formula = 0.0;    // ½∫V″(u₁² + u₂² − a²)
  double sigma_quadratic = 0.0;  // ⟨U′, (V + ½D³W(U)[W])U′⟩
  double rel_defect = 0.0;
};

SigmaConsistency sigma_consistency(const PotentialSpec& spec, const LocalizedPotential& V,
                                   const RealField2& wall0, const RealField2& W, double x0 = 0.0);

struct PinningOptions {
  double eps_max = 0.05;
  double tol = 1e-10;
  int max_newton = 30;
  int max_halvings = 8;       // continuation depth when Newton fails
  bool ratio_check = true;    // also solve at ε/2 for the persistence ratio
  double stability_tol = 1e-8;
};

struct PinningReport {
  double x0 = 0.0;
  double sigma = 0.0;
  double eps = 0.0;
  RealField2 pinned_profile;
  double residual_sup = 0.0;
  int newton_iterations = 0;
  int continuation_steps = 0;
  double persistence_sup = 0.0;     // sup |U − U₀(· − x₀)|
  double persistence_ratio = 0.0;   // persistence_sup(ε) / persistence_sup(ε/2)
  double symmetric_defect = 0.0;    // max |u₂(x) − u₁(−x)|
  double lplus_min_eig = 0.0;
  double predicted_shift = 0.0;     // ε·σ/‖U′‖², first-order λ_min(L₊(ε))
  int lplus_negative_count = 0;
  double lminus_min_eig = 0.0;
  double neg_lambda_sq = 0.0;
  int pencil_iterations = 0;
  Verdict verdict = Verdict::marginal;
};

/// ‖U′‖² of the wall (high-order derivative, trapezoid rule).
double uprime_norm_sq(const RealField2& wall0);

/// Newton on −U″ + (εV + ∂ⱼF)uⱼ = 0 from U₀(· − x₀), stepping through
/// smaller ε when the full step fails. Refuses |σ| < 1e−10 and |ε| > eps_max.
PinningReport solve_pinned_wall(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                                const RealField2& wall0, double x0,
                                const PinningOptions& opts = {});

/// L₊(ε), L₋(ε) at the pinned profile: λ_min(L₊(ε)) against ε·σ/‖U′‖²,
/// its negative-eigenvalue count, and −λ² as the minimum of
/// ⟨L₊Ψ,Ψ⟩/⟨L₋⁻¹Ψ,Ψ⟩ (L₋(ε) is positive on the truncated domain).
void pinned_spectrum(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                     PinningReport& report, const PinningOptions& opts = {});

/// find_x0 → compute_sigma → solve_pinned_wall → pinned_spectrum.
PinningReport run_pinning(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                          const RealField2& wall0, const PinningOptions& opts = {});

}  // namespace wallforge
