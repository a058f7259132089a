#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wallforge {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
/// Fully symmetric third-derivative tensor, indexed t[i][j][k].
using Tensor3 = std::array<Mat2, 2>;

enum class PotentialKind { symmetric_cubic, general_cubic, quartic };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// F and its partial derivatives in the squared moduli ξ = (|ψ₁|², |ψ₂|²).
struct FDerivatives {
  double f = 0.0;
  Vec2 d1{};     // ∂ⱼF
  Mat2 d2{};     // ∂ᵢ∂ⱼF
  Tensor3 d3{};  // ∂ᵢ∂ⱼ∂ₖF
};

/// Coefficients of the shared polynomial form used by all three kinds:
///   F(ξ) = α (c₁t₁ + c₂t₂ − μ)² + β t₁t₂,   tⱼ = ξⱼ^degree.
/// Cubic kinds have degree 1, the quartic kind degree 2.
struct PolyCoeffs {
  int degree = 1;
  double alpha = 0.5;
  double c1 = 1.0;
  double c2 = 1.0;
  double mu = 1.0;
  double beta = 0.0;

  friend bool operator==(const PolyCoeffs&, const PolyCoeffs&) = default;
};

/// An admissible two-well potential W(Ψ) = F(|ψ₁|², |ψ₂|²).
///
/// Construction validates the parameter constraints (γ > 1, or
/// g₁₁, g₂₂ > 0 with g₁₂ > √(g₁₁g₂₂)) and throws Error{domain} otherwise.
class PotentialSpec {
public:
  static PotentialSpec symmetric_cubic(double gamma);
  static PotentialSpec general_cubic(double g11, double g22, double g12, double mu);
  static PotentialSpec quartic(double gamma);

  PotentialKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  double g11() const noexcept { return g11_; }
  double g22() const noexcept { return g22_; }
  double g12() const noexcept { return g12_; }
  double mu() const noexcept { return mu_; }

  /// Right equilibrium (a, 0).
  Vec2 a_state() const noexcept { return {a_, 0.0}; }
  /// Left equilibrium (0, b).
  Vec2 b_state() const noexcept { return {0.0, b_}; }
  /// Interior equilibrium (symmetric-cubic only).
  std::optional<Vec2> c_state() const;

  bool is_symmetric() const noexcept;
  bool is_exact_gamma3() const noexcept;

  const PolyCoeffs& coeffs() const noexcept { return coeffs_; }

  /// Weights √g₁₁, √g₂₂ used by the mass functional m(U).
  Vec2 mass_weights() const noexcept;

  FDerivatives f_derivatives(const Vec2& xi) const;

  std::string describe() const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

private:
  PotentialSpec() = default;
  void finalize();

  PotentialKind kind_ = PotentialKind::symmetric_cubic;
  double gamma_ = 0.0;
  double g11_ = 1.0, g22_ = 1.0, g12_ = 0.0, mu_ = 1.0;
  double a_ = 1.0, b_ = 1.0;
  PolyCoeffs coeffs_{};
};

double eval_W(const PotentialSpec& spec, const Vec2& p);
Vec2 grad_W(const PotentialSpec& spec, const Vec2& p);
Mat2 hess_W(const PotentialSpec& spec, const Vec2& p);
Tensor3 third_W(const PotentialSpec& spec, const Vec2& p);

/// ∂ⱼF(u₁², u₂²), the diagonal entries of L₋ and the phase rate of the flow.
Vec2 dF_at(const PotentialSpec& spec, const Vec2& u);

/// Closed-form wall for symmetric-cubic γ = 3:
/// (½[1 + tanh(x/√2)], ½[1 − tanh(x/√2)]).
Vec2 exact_wall(const PotentialSpec& spec, double x);

struct SampleBox {
  double x_min = 0.0, x_max = 2.0;
  double y_min = 0.0, y_max = 2.0;
};

struct AxiomFailure {
  std::string axiom;
  Vec2 witness{};
  double value = 0.0;
  std::string detail;
};

struct AxiomReport {
  double min_W = 0.0;
  Vec2 min_W_at{};
  Vec2 hess_min_eig{};  // smallest eigenvalue of D²W at a_state, b_state
  double R0 = 0.0;
  double c0 = 0.0;
  double w5_min = 0.0;  // min of ∂₁∂₂F over samples
  double w5_max = 0.0;
  bool w5_closed_form_nonneg = false;
  std::size_t n_samples = 0;
  std::vector<AxiomFailure> failures;

  bool passed() const noexcept { return failures.empty(); }
  bool passed(const std::string& axiom) const;
  /// Throws Error{axiom_violation} naming the first failure and its witness.
  void throw_if_failed() const;
};

AxiomReport check_W_axioms(const PotentialSpec& spec, const SampleBox& box,
                           std::size_t n_samples, std::uint64_t seed = 0x5eedu);

}  // namespace wallforge
