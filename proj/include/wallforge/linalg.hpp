#pragma once

#include "wallforge/discretization.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace wallforge {

/// Symmetric 2N×2N operator −∂ₓ² ⊗ I + [[p₁, c], [c, p₂]] on a grid with
/// homogeneous Dirichlet conditions, stored in stacked layout (component 1
/// nodes, then component 2). The diagonal blocks are tridiagonal and the
/// coupling blocks diagonal, so the stacked bandwidth is N.
struct OperatorMatrix {
  Grid grid;
  std::string label;
  std::vector<double> p1, p2, coupling;

  int dim() const noexcept { return 2 * grid.N; }
  int bandwidth() const noexcept { return grid.N; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Sparse copy of M − shift·I.
  Eigen::SparseMatrix<double> to_sparse(double shift = 0.0) const;
  /// max |Mᵢⱼ − Mⱼᵢ| over the stored entries.
  double symmetry_defect() const;
  /// Lower bound on the spectrum from Gershgorin discs.
  double gershgorin_lower() const;
  /// Adds d to both diagonal potentials (used for the εV term).
  OperatorMatrix with_added_potential(const std::vector<double>& d, const std::string& new_label) const;
};

/// Stacked vector ↔ field conversions (interior values only).
Eigen::VectorXd stack(const std::vector<double>& a, const std::vector<double>& b);
Eigen::VectorXd stack(const RealField2& U);
void unstack(const Eigen::VectorXd& v, std::vector<double>& a, std::vector<double>& b);

/// Sparse LU factorization of a stacked-layout operator, optionally followed
/// by `border` extra rows/columns, with structured failure reporting.
class SparseFactor {
public:
  explicit SparseFactor(const Eigen::SparseMatrix<double>& A, int border = 0);
  ~SparseFactor();
  SparseFactor(const SparseFactor&) = delete;
  SparseFactor& operator=(const SparseFactor&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int dim() const noexcept { return n_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

/// Solver for the bordered system [[M − shift·I, C], [Cᵀ, 0]] whose solution
/// y satisfies Cᵀy = 0 and (M − shift·I)y = b − Cs. With C orthonormal
/// columns spanning an invariant subspace this is the inverse on C⊥.
class BorderedSolver {
public:
  BorderedSolver(const OperatorMatrix& M, std::vector<Eigen::VectorXd> constraints,
                 double shift = 0.0);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// Lagrange multipliers of the last solve.
  const Eigen::VectorXd& multipliers() const noexcept { return last_mult_; }

private:
  int n_ = 0;
  std::vector<Eigen::VectorXd> c_;
  std::unique_ptr<SparseFactor> factor_;
  mutable Eigen::VectorXd last_mult_;
};

struct Eigenpairs {
  std::vector<double> values;            // ascending
  std::vector<Eigen::VectorXd> vectors;  // orthonormal, stacked layout
  std::vector<double> residuals;         // ‖Mv − λv‖ for unit v
};

/// k smallest eigenpairs. Eigenvalues come from bisection on the banded
/// (interleaved, bandwidth 2) form; eigenvectors from shift-invert inverse
/// iteration on a sparse factorization with deflation against already
/// accepted vectors. Residuals are driven below 1e−8.
Eigenpairs smallest_eigs(const OperatorMatrix& M, int k);

/// Number of eigenvalues strictly below `threshold` (bisection count).
int count_below(const OperatorMatrix& M, double threshold);

}  // namespace wallforge
