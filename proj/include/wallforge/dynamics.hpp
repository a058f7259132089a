#pragma once

#include "wallforge/discretization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wallforge {

/// Half-width A of the window on which ρ_A measures the sup distance.
inline constexpr double kDefaultRhoRadius = 5.0;

/// Quintic smoothstep cutoff: 1 on |x| ≤ R, 0 on |x| ≥ 2R, C² in between.
double cutoff(double x, double R);
double cutoff_derivative(double x, double R);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> alpha;   // fitted wall centre (empty entries are NaN when no wall is given)
  std::vector<double> theta1;
  std::vector<double> theta2;
  std::vector<double> rho;     // ρ_A distance to the modulated wall
  std::vector<double> energy;
  std::vector<double> mass_center_G;
  std::vector<ComplexField2> states;  // kept only when requested
  ComplexField2 final_state;
  double energy_drift = 0.0;          // max_t |E(t) − E(0)| / |E(0)|
  double max_modulus_defect = 0.0;    // max_t sup |ψⱼ| − |ψⱼ(0)| (stationarity diagnostic)
  int steps = 0;
  std::vector<std::string> warnings;
};

struct EvolveOptions {
  double output_interval = 0.0;       // 0 → max(dt, T/2000)
  std::optional<RealField2> wall;     // reference wall for modulation fits and G
  double R = 0.0;                     // cutoff radius of G; 0 → L/3
  double rho_radius = kDefaultRhoRadius;
  double orbit_cap = 1.0;             // ρ above this aborts the fit with Error{left_orbit}
  double alpha_search = 2.0;          // half-width of the α search around its seed
  bool keep_states = false;
};

/// Strang splitting for iψⱼₜ = −ψⱼ″ + (εV + ∂ⱼF(|ψ₁|², |ψ₂|²))ψⱼ: exact
/// half-step phase rotations around a Crank–Nicolson kinetic step with the
/// boundary values held fixed. The equation is written in the frame that
/// co-rotates with the equilibria, where a real wall is exactly stationary.
/// `V` may be empty (no external potential) or hold one value per node.
EvolutionTrace evolve(const PotentialSpec& spec, const ComplexField2& psi0, double T, double dt,
                      const std::vector<double>& V = {}, double eps = 0.0,
                      const EvolveOptions& opts = {});

/// Multiplies ψⱼ by e^{−iωⱼt}, with ωⱼ = −∂ⱼF(0, 0), mapping a co-rotating
/// state to the laboratory frame of the Gross–Pitaevskii system.
ComplexField2 to_lab_frame(const PotentialSpec& spec, const ComplexField2& psi, double t);

/// (1/m)·∫ g_R(x)·x·(√g₁₁|ψ₁|² + √g₂₂|ψ₂|² − μ)(x − a_shift) dx, with m the
/// mass m(U) of the reference wall.
double mass_center_G(const PotentialSpec& spec, const ComplexField2& psi, double a_shift, double R,
                     double wall_mass);

struct ModulationFit {
  double alpha = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double rho = 0.0;
  int evaluations = 0;
};

/// Minimises ρ_A(ψ, (e^{iθ₁}u₁(·+α), e^{iθ₂}u₂(·+α))) by coordinate descent
/// in α (golden section) with the phases set from ⟨uⱼ(·+α), ψⱼ⟩.
/// Throws Error{left_orbit} when the minimum exceeds `cap`.
ModulationFit modulation_fit(const ComplexField2& psi, const RealField2& wall, double alpha_seed,
                             double search = 2.0, double rho_radius = kDefaultRhoRadius,
                             double cap = 1.0);

struct MomentumReport {
  std::vector<double> times;
  std::vector<double> numerator;       // ∫ g_R·x·(…) dx
  std::vector<double> momentum;        // 2∫[√g₁₁⟨iψ₁,ψ₁′⟩ + √g₂₂⟨iψ₂,ψ₂′⟩](x g_R)′ dx
  std::vector<double> numerator_rate;  // centred difference of the numerator in time
  std::vector<double> momentum_integral;  // ∫₀ᵗ momentum, trapezoid
  double max_abs_momentum = 0.0;
  double max_identity_defect = 0.0;    // max |rate − momentum| / max|momentum| over interior times
};

/// Momentum of the localised centre-of-mass law along a stored path.
double localized_momentum(const PotentialSpec& spec, const ComplexField2& psi, double R);
double localized_numerator(const PotentialSpec& spec, const ComplexField2& psi, double R);
MomentumReport momentum_drift(const PotentialSpec& spec, const std::vector<double>& times,
                              const std::vector<ComplexField2>& states, double R);

struct OrbitalOptions {
  double dt = 1e-3;
  double K = 5.0;            // sup ρ ≤ K·eps
  double C_max = 10.0;       // |α(t)| ≤ C·eps·max(1, t) with fitted C ≤ C_max
  std::uint64_t seed = 1;
  double output_interval = 0.0;
  double rho_radius = kDefaultRhoRadius;
};

struct OrbitalResult {
  EvolutionTrace trace;
  double eps = 0.0;
  double initial_rho = 0.0;
  double sup_rho = 0.0;
  double fitted_C = 0.0;     // max_t |α(t)| / (eps·max(1, t))
  bool rho_ok = false;
  bool alpha_ok = false;
  bool pass = false;
};

/// Localised perturbation: Gaussian bumps of width 1 at x = 0 in the real
/// and imaginary parts of both components with seeded amplitudes, scaled so
/// that ρ_A(ψ, U) = eps.
ComplexField2 perturbed_wall(const RealField2& wall, double eps, std::uint64_t seed,
                             double rho_radius = kDefaultRhoRadius);

OrbitalResult orbital_stability_experiment(const PotentialSpec& spec, const RealField2& wall,
                                           double eps, double T, const OrbitalOptions& opts = {});

}  // namespace wallforge
