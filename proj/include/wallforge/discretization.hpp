#pragma once

#include "wallforge/potential.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace wallforge {

using cplx = std::complex<double>;

/// Uniform grid on [−L, L] with N interior nodes xᵢ = −L + (i+1)h,
/// h = 2L/(N+1). N is odd so that x = 0 is the node (N−1)/2.
struct Grid {
  double L = 0.0;
  int N = 0;
  double h = 0.0;

  static Grid make(double L, int N);

  double x(int i) const noexcept { return -L + (i + 1) * h; }
  int center_index() const noexcept { return (N - 1) / 2; }
  std::vector<double> nodes() const;

  /// Trapezoid rule on [−L, L] for an integrand given at the interior nodes
  /// and at the two endpoints.
  double integrate(const std::vector<double>& f, double f_left = 0.0, double f_right = 0.0) const;

  bool same_as(const Grid& other) const noexcept { return L == other.L && N == other.N; }
};

/// Half-width for which min(√Σa, √Σb)·L ≥ margin, with Σa, Σb the smallest
/// eigenvalues of ½D²W at the two equilibria. Throws Error{unsupported} for
/// potentials with a degenerate minimum.
double default_half_width(const PotentialSpec& spec, double margin = 18.0);

struct RealField2 {
  Grid grid;
  std::vector<double> u1, u2;
  Vec2 left_bc{};   // value at x = −L (b_state for a wall)
  Vec2 right_bc{};  // value at x = +L (a_state for a wall)

  static RealField2 zeros(const Grid& g, const Vec2& left, const Vec2& right);
  static RealField2 sample(const Grid& g, const Vec2& left, const Vec2& right,
                           const std::function<Vec2(double)>& fn);

  Vec2 at(int i) const { return {u1[i], u2[i]}; }
  /// Throws Error{usage} for length mismatches and Error{non_finite} for NaN/Inf.
  void validate() const;
};

struct ComplexField2 {
  Grid grid;
  std::vector<cplx> psi1, psi2;
  std::array<cplx, 2> left_bc{};
  std::array<cplx, 2> right_bc{};

  static ComplexField2 from_real(const RealField2& U);
  /// Multiplies each component (and its boundary values) by e^{iβⱼ}.
  ComplexField2 gauge(double beta1, double beta2) const;
  void validate() const;
};

/// (f[i−1] − 2f[i] + f[i+1])/h² with Dirichlet ghost values.
std::vector<double> second_derivative(const Grid& g, const std::vector<double>& f, double left,
                                      double right);

/// Discrete energy ∫ ½(|U′|² + W(U)) dx: squared edge differences over all
/// N+1 edges (ghosts included) plus the nodal potential. Its gradient with
/// respect to the interior values is exactly h·el_residual.
double energy(const PotentialSpec& spec, const RealField2& U);
double energy(const PotentialSpec& spec, const ComplexField2& psi);

/// Nodewise −U″ + ½∇W(U).
RealField2 el_residual(const PotentialSpec& spec, const RealField2& U);

double sup_norm(const RealField2& U);
double sup_distance(const RealField2& a, const RealField2& b);
double l2_norm(const Grid& g, const std::vector<double>& f);
double dot(const Grid& g, const std::vector<double>& a, const std::vector<double>& b);

/// Centered-difference derivative U′ at the interior nodes, ghosts included.
RealField2 derivative(const RealField2& U);

/// ρ_A(ψ, φ): Σⱼ ‖ψⱼ′−φⱼ′‖_{L²} + ‖|ψⱼ|−|φⱼ|‖_{L²} + ‖ψⱼ−φⱼ‖_{L^∞(−A,A)}.
double rho_A(const ComplexField2& psi, const ComplexField2& phi, double A);

/// V(x) = U(x − shift) by four-point cubic interpolation; values beyond the
/// ends are continued by the boundary values.
RealField2 translate(const RealField2& U, double shift);
ComplexField2 translate(const ComplexField2& psi, double shift);

/// Cubic interpolation of an interior array (with ghosts) at position x.
double interpolate(const Grid& g, const std::vector<double>& f, double left, double right, double x);

// CSV with one row per node, endpoints x = ±L included so that boundary
// values travel with the data. Numbers are written with 17 significant
// digits for exact round trips.
void write_csv(std::ostream& os, const RealField2& U);
void write_csv(std::ostream& os, const ComplexField2& psi);
void write_csv(const std::string& path, const RealField2& U);
void write_csv(const std::string& path, const ComplexField2& psi);
RealField2 read_real_csv(std::istream& is);
RealField2 read_real_csv(const std::string& path);
ComplexField2 read_complex_csv(std::istream& is);
ComplexField2 read_complex_csv(const std::string& path);

}  // namespace wallforge
