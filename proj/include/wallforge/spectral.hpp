#pragma once

#include "wallforge/linalg.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wallforge {

/// L₊ = −∂ₓ² + ½D²W(U) with homogeneous Dirichlet conditions.
OperatorMatrix assemble_Lplus(const PotentialSpec& spec, const RealField2& U);
/// L₋ = −∂ₓ² + diag(∂₁F(u₁², u₂²), ∂₂F(u₁², u₂²)).
OperatorMatrix assemble_Lminus(const PotentialSpec& spec, const RealField2& U);

/// Σ₀: smallest eigenvalue of ½D²W over the two equilibria.
double essential_edge(const PotentialSpec& spec);

/// A smooth trial coefficient pair (f₁, f₂) with derivatives.
struct TrialPair {
  std::function<double(double)> f1, df1, f2, df2;

  static TrialPair constant(double c1, double c2);
  /// Sum of `bumps` Gaussians per component with seeded random centres in
  /// [−5, 5], widths in [0.5, 2] and amplitudes in [−1, 1].
  static TrialPair random_bumps(std::uint64_t seed, int bumps = 3);
};

struct QuadraticFormCheck {
  double lplus_direct = 0.0;    // ⟨Φ_R, L₊Φ_R⟩ from the discrete operator
  double lplus_identity = 0.0;  // ∫ (A₁′u₁′)² + (A₂′u₂′)² − ½W₁₂ u₁′u₂′(A₁−A₂)²
  double lminus_direct = 0.0;   // ⟨Φ_I, L₋Φ_I⟩
  double lminus_identity = 0.0; // ∫ (B₁′u₁)² + (B₂′u₂)²
  double lplus_scale = 0.0;     // magnitude used to normalise the defects
  double lminus_scale = 0.0;
  double lplus_defect = 0.0;    // |direct − identity| / scale
  double lminus_defect = 0.0;
};

/// Evaluates both sides of the integration-by-parts identities for the
/// quadratic forms of L₊ (trial Φ_R = (A₁u₁′, A₂u₂′)) and L₋ (trial
/// Φ_I = (B₁u₁, B₂u₂)). The discrete forms use the fields' own boundary
/// values so non-decaying trials (constant B) are admissible.
QuadraticFormCheck quadratic_form_identity_check(const PotentialSpec& spec, const RealField2& U,
                                                 const TrialPair& A, const TrialPair& B);

enum class Verdict { stable, unstable, marginal };
std::string to_string(Verdict v);

struct SpectralOptions {
  int k = 8;
  double stability_tol = 1e-6;
  double min_gap = 0.1;
  /// Evaluate the Rayleigh denominator ⟨L₊⁻¹Φ, Φ⟩/‖Φ‖² on this many random Φ ⊥ U′.
  int denominator_samples = 50;
  std::uint64_t seed = 7;
};

struct SpectralReport {
  std::vector<double> lplus_eigs;
  std::vector<double> lminus_eigs;
  std::vector<double> lplus_residuals;
  std::vector<double> lminus_residuals;
  double zero_mode_overlap = 0.0;  // |cos| between L₊ ground vector and discrete U′
  double lplus_uprime_residual = 0.0;  // ‖L₊U′‖/‖U′‖
  double essential_edge = 0.0;
  double gap = 0.0;                // λ₁ − λ₀ of L₊
  bool ground_state_signed = false; // φ₁ > 0, φ₂ < 0 nodewise after normalisation
  double neg_lambda_sq = 0.0;
  int pencil_iterations = 0;
  double pencil_residual = 0.0;
  double denominator_min = 0.0;    // min of ⟨L₊⁻¹Φ,Φ⟩/‖Φ‖² over the random samples
  Verdict verdict = Verdict::marginal;
  std::vector<double> ground_vector;  // stacked L₊ ground eigenvector
  std::vector<Eigen::VectorXd> lplus_vectors;   // stacked, unit Euclidean norm
  std::vector<Eigen::VectorXd> lminus_vectors;
};

/// Spectra of L₊ and L₋ plus −λ² = inf ⟨L₋Φ,Φ⟩/⟨L₊⁻¹Φ,Φ⟩ over Φ in the
/// complement of the translation mode.
SpectralReport stability_spectrum(const PotentialSpec& spec, const RealField2& U,
                                  const SpectralOptions& opts = {});

/// Result of minimising the Rayleigh quotient xᵀAx / xᵀBx.
struct PencilResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  double residual = 0.0;
};

/// Locally optimal block preconditioned CG for the smallest eigenvalue of the
/// symmetric pencil (A, B) with B positive definite on the working subspace.
/// `project` maps vectors into that subspace; `precond` approximates A⁻¹.
PencilResult min_pencil(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_A,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_B,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precond,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project,
                        const Eigen::VectorXd& x0, double tol = 1e-10, int max_iter = 500);

/// Dense check of the linearised problem L₊Φ_R = −λΦ_I, L₋Φ_I = λΦ_R:
/// all eigenvalues of the 4N×4N block matrix, returned as −λ² sorted by
/// real part, with the translation pair identified by eigenvector overlap.
struct DenseSpectrum {
  std::vector<double> neg_lambda_sq;   // real parts of −λ², ascending, translation pair removed
  double max_imag = 0.0;               // largest |Im(−λ²)| seen
  double translation_value = 0.0;      // −λ² of the removed pair
  double min_value = 0.0;
};
DenseSpectrum dense_linearized_spectrum(const PotentialSpec& spec, const RealField2& U,
                                        const Eigen::VectorXd& translation_mode);

}  // namespace wallforge
