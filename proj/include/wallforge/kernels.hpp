#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace wallforge::kernels {

using cplx = std::complex<double>;

/// Coefficients of F(ξ) = α(c₁t₁ + c₂t₂ − μ)² + βt₁t₂ with tⱼ = ξⱼ^degree,
/// degree ∈ {1, 2}. Mirrors PolyCoeffs so kernels stay free of model types.
struct ForceCoeffs {
  int degree = 1;
  double alpha = 0.5;
  double c1 = 1.0;
  double c2 = 1.0;
  double mu = 1.0;
  double beta = 0.0;
};

/// Hot loops of the library. Every entry has a scalar reference version and,
/// when the CPU supports it, an AVX2+FMA version; the two are required to
/// agree to rounding (see tests/test_kernels.cpp).
///
/// Arrays hold the n interior nodes; `left`/`right` are the Dirichlet ghost
/// values just outside the interior.
struct KernelTable {
  const char* name;

  /// out[i] = −(f[i−1] − 2f[i] + f[i+1])·inv_h2 + pot[i]·f[i].
  /// `pot` may be null, in which case the potential term is dropped.
  void (*schrodinger_apply)(const double* f, std::size_t n, double left, double right,
                            double inv_h2, const double* pot, double* out);

  /// d1[i] = ∂₁F(xi1[i], xi2[i]), d2[i] = ∂₂F(xi1[i], xi2[i]).
  void (*force)(const double* xi1, const double* xi2, std::size_t n, const ForceCoeffs& c,
                double* d1, double* d2);

  /// Σᵢ F(xi1[i], xi2[i]).
  double (*potential_sum)(const double* xi1, const double* xi2, std::size_t n,
                          const ForceCoeffs& c);

  /// Σ over the n+1 edges (including both ghost edges) of (f[i+1] − f[i])².
  double (*gradient_sq_sum)(const double* f, std::size_t n, double left, double right);

  /// Complex analogue of gradient_sq_sum: Σ |f[i+1] − f[i]|².
  double (*gradient_sq_sum_complex)(const cplx* f, std::size_t n, cplx left, cplx right);

  /// out[i] = |psi[i]|².
  void (*modulus_sq)(const cplx* psi, std::size_t n, double* out);

  /// psi[i] ← psi[i]·exp(−i·rate[i]·tau).
  void (*phase_rotate)(cplx* psi, const double* rate, std::size_t n, double tau);

  /// out[i] = psi[i] + i·r·(psi[i−1] − 2psi[i] + psi[i+1]) with ghosts.
  void (*cn_rhs)(const cplx* psi, std::size_t n, cplx left, cplx right, double r, cplx* out);
};

const KernelTable& scalar_table();

/// The AVX2 table, or nullptr if it was not compiled in or the running CPU
/// lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table used by the library. Chosen once from the CPU features; the
/// WALLFORGE_SIMD environment variable (scalar|avx2) overrides the choice.
const KernelTable& active();

/// Force a table by name ("scalar", "avx2" or "auto"). Returns false if the
/// requested table is unavailable, leaving the selection unchanged.
bool select(std::string_view name);

}  // namespace wallforge::kernels
