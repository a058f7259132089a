#pragma once

#include "wallforge/discretization.hpp"

#include <array>
#include <string>

namespace wallforge {

struct DecayFit {
  double rate = 0.0;       // fitted exponential rate
  double predicted = 0.0;  // √ of the relevant entry of ½D²W at the equilibrium
  int points = 0;          // nodes in the tail window
  double rel_error() const { return predicted > 0.0 ? (rate - predicted) / predicted : 0.0; }
};

struct WallReport {
  RealField2 profile;
  double energy = 0.0;
  double residual_sup = 0.0;
  double center = 0.0;           // position of the u₁ = u₂ crossing
  double mass_center_shift = 0.0;
  double center_u1 = 0.0;        // u₁ at the node x = 0
  double center_u2 = 0.0;
  DecayFit decay_left;           // u₁ → 0 as x → −∞
  DecayFit decay_right;          // a − u₁ → 0 as x → +∞
  DecayFit decay_left_u2;        // b − u₂ → 0 as x → −∞
  DecayFit decay_right_u2;       // u₂ → 0 as x → +∞
  std::array<bool, 2> monotone{false, false};
  double symmetric_defect = 0.0; // max |u₂(x) − u₁(−x)|, NaN for asymmetric kinds
  int flow_steps = 0;
  int newton_iterations = 0;
  std::string initial_guess = "tanh";
};

/// U₀(x) = (a(1 + tanh x)/2, b(1 − tanh x)/2).
RealField2 initial_guess(const PotentialSpec& spec, const Grid& grid);

struct FlowResult {
  RealField2 field;
  int accepted = 0;
  int rejected = 0;
  double dt = 0.0;               // final step size
  std::vector<double> energies;  // energy after each accepted step (and the start)
};

/// Explicit descent U ← U − dt·(−U″ + ½∇W(U)). Steps that increase the
/// energy are rejected and dt halved. Throws Error{usage} if dt > h²/4 and
/// Error{not_converged} if dt underflows.
FlowResult gradient_flow(const PotentialSpec& spec, const RealField2& U0, double dt, int steps,
                         bool record_energies = false);

/// Damped Newton on −U″ + ½∇W(U) = 0 with Jacobian L₊, bordered by the
/// constraint ⟨U′, δU⟩ = 0 that removes the translation mode. Fills the full
/// report (diagnostics via verify_wall_properties).
WallReport newton_polish(const PotentialSpec& spec, const RealField2& U, double tol = 1e-10,
                         int max_iter = 50);

struct CenterResult {
  RealField2 profile;
  double shift = 0.0;       // crossing position of the input profile
  double mass_shift = 0.0;  // ∫x(√g₁₁u₁² + √g₂₂u₂² − μ)dx / m(U) of the output
};

/// Translates the profile so that the u₁ = u₂ crossing sits at x = 0.
/// Throws Error{no_crossing} for zero or several crossings.
CenterResult normalize_center(const PotentialSpec& spec, const RealField2& U);

/// m(U) = ∫(√g₁₁u₁² + √g₂₂u₂² − μ)dx and the mass-centre ∫x(…)dx / m(U).
double wall_mass(const PotentialSpec& spec, const RealField2& U);
double mass_center(const PotentialSpec& spec, const RealField2& U);

/// Location of the u₁ = u₂ crossing by cubic interpolation.
double crossing_position(const RealField2& U);

struct PropertyReport {
  bool nonnegative = false;
  double bound_max = 0.0;  // max over nodes of u₁²/a² + u₂²/b²
  bool bound_ok = false;   // bound_max ≤ 1 + 1e−10
  bool monotone_u1 = false;
  bool monotone_u2 = false;
  bool symmetric_kind = false;
  double symmetric_defect = 0.0;
  DecayFit decay_left, decay_right, decay_left_u2, decay_right_u2;
  bool decay_ok = false;   // left/right rates within 2 % of prediction
  double center_value = 0.0;
  double center_conjecture = 0.0;  // 1/√(1+γ) for symmetric-cubic, NaN otherwise
};

PropertyReport verify_wall_properties(const PotentialSpec& spec, const WallReport& report);

/// Fit of log v(x) = c₀ + c₁x + c₂ log|x − x_c| over nodes with
/// lo ≤ v ≤ hi; returns |c₁|.
DecayFit fit_decay(const Grid& g, const std::vector<double>& v, double center, bool left_tail,
                   double lo = 1e-8, double hi = 1e-3);

struct SolveOptions {
  double tol = 1e-10;
  int max_newton = 50;
  int flow_steps = 400;
  double flow_dt_factor = 0.2;  // dt = factor · h²
  double guess_shift = 0.0;     // translate the initial guess (tests translation invariance)
  bool center = true;
};

/// initial_guess → gradient_flow → newton_polish → normalize_center → re-polish.
WallReport solve_wall(const PotentialSpec& spec, const Grid& grid, const SolveOptions& opts = {});

}  // namespace wallforge
