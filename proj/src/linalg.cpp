#include "wallforge/linalg.hpp"

#include "wallforge/error.hpp"
#include "wallforge/kernels.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

extern "C" {
void dsbevx_(const char* jobz, const char* range, const char* uplo, const int* n, const int* kd,
             double* ab, const int* ldab, double* q, const int* ldq, const double* vl,
             const double* vu, const int* il, const int* iu, const double* abstol, int* m,
             double* w, double* z, const int* ldz, double* work, int* iwork, int* ifail, int* info);
double dlamch_(const char* cmach);
}

namespace wallforge {

namespace {

constexpr int kBand = 2;

// Lower band storage of the interleaved ordering (u₁₀, u₂₀, u₁₁, u₂₁, …),
// in which the operator has bandwidth 2.
std::vector<double> interleaved_band(const OperatorMatrix& M) {
  const int N = M.grid.N;
  const int n = 2 * N;
  const int ld = kBand + 1;
  const double inv_h2 = 1.0 / (M.grid.h * M.grid.h);
  std::vector<double> ab(static_cast<std::size_t>(ld) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return ab[(i - j) + static_cast<std::size_t>(j) * ld]; };
  for (int m = 0; m < N; ++m) {
    at(2 * m, 2 * m) = 2.0 * inv_h2 + M.p1[m];
    at(2 * m + 1, 2 * m + 1) = 2.0 * inv_h2 + M.p2[m];
    at(2 * m + 1, 2 * m) = M.coupling[m];
    if (m + 1 < N) {
      at(2 * m + 2, 2 * m) = -inv_h2;
      at(2 * m + 3, 2 * m + 1) = -inv_h2;
    }
  }
  return ab;
}

struct BandEigs {
  std::vector<double> values;
};

BandEigs band_eigenvalues(const OperatorMatrix& M, char range, double vl, double vu, int il, int iu) {
  std::vector<double> ab = interleaved_band(M);
  const int n = M.dim();
  const int kd = kBand;
  const int ldab = kBand + 1;
  const int ldq = 1;
  const int ldz = 1;
  const char jobz = 'N';
  const char uplo = 'L';
  const char safe = 'S';
  const double abstol = 2.0 * dlamch_(&safe);
  int m = 0;
  int info = 0;
  std::vector<double> w(n), work(7 * static_cast<std::size_t>(n));
  std::vector<int> iwork(5 * static_cast<std::size_t>(n)), ifail(n);
  double q = 0.0;
  double z = 0.0;
  dsbevx_(&jobz, &range, &uplo, &n, &kd, ab.data(), &ldab, &q, &ldq, &vl, &vu, &il, &iu, &abstol,
          &m, w.data(), &z, &ldz, work.data(), iwork.data(), ifail.data(), &info);
  if (info != 0) {
    throw Error(ErrorCode::not_converged,
                "banded eigenvalue bisection failed (info=" + std::to_string(info) + ")");
  }
  w.resize(m);
  return {w};
}

}  // namespace

Eigen::VectorXd OperatorMatrix::apply(const Eigen::VectorXd& x) const {
  const int N = grid.N;
  if (x.size() != 2 * N) throw Error(ErrorCode::usage, "operator/vector size mismatch");
  Eigen::VectorXd y(2 * N);
  const auto& k = kernels::active();
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  k.schrodinger_apply(x.data(), N, 0.0, 0.0, inv_h2, p1.data(), y.data());
  k.schrodinger_apply(x.data() + N, N, 0.0, 0.0, inv_h2, p2.data(), y.data() + N);
  for (int i = 0; i < N; ++i) {
    y[i] += coupling[i] * x[N + i];
    y[N + i] += coupling[i] * x[i];
  }
  return y;
}

Eigen::SparseMatrix<double> OperatorMatrix::to_sparse(double shift) const {
  const int N = grid.N;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(8) * N);
  for (int c = 0; c < 2; ++c) {
    const auto& p = (c == 0) ? p1 : p2;
    const int off = c * N;
    for (int i = 0; i < N; ++i) {
      t.emplace_back(off + i, off + i, 2.0 * inv_h2 + p[i] - shift);
      if (i > 0) t.emplace_back(off + i, off + i - 1, -inv_h2);
      if (i + 1 < N) t.emplace_back(off + i, off + i + 1, -inv_h2);
    }
  }
  for (int i = 0; i < N; ++i) {
    if (coupling[i] != 0.0) {
      t.emplace_back(i, N + i, coupling[i]);
      t.emplace_back(N + i, i, coupling[i]);
    }
  }
  Eigen::SparseMatrix<double> A(2 * N, 2 * N);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

double OperatorMatrix::symmetry_defect() const {
  const Eigen::SparseMatrix<double> A = to_sparse();
  const Eigen::SparseMatrix<double> At = A.transpose();
  const Eigen::SparseMatrix<double> D = A - At;
  double m = 0.0;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double OperatorMatrix::gershgorin_lower() const {
  const int N = grid.N;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  double lo = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 2; ++c) {
    const auto& p = (c == 0) ? p1 : p2;
    for (int i = 0; i < N; ++i) {
      const double off = ((i > 0) + (i + 1 < N)) * inv_h2 + std::abs(coupling[i]);
      lo = std::min(lo, 2.0 * inv_h2 + p[i] - off);
    }
  }
  return lo;
}

OperatorMatrix OperatorMatrix::with_added_potential(const std::vector<double>& d,
                                                    const std::string& new_label) const {
  if (static_cast<int>(d.size()) != grid.N) throw Error(ErrorCode::usage, "potential length mismatch");
  OperatorMatrix out = *this;
  out.label = new_label;
  for (int i = 0; i < grid.N; ++i) {
    out.p1[i] += d[i];
    out.p2[i] += d[i];
  }
  return out;
}

Eigen::VectorXd stack(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::VectorXd v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = a[i];
    v[n + i] = b[i];
  }
  return v;
}

Eigen::VectorXd stack(const RealField2& U) { return stack(U.u1, U.u2); }

void unstack(const Eigen::VectorXd& v, std::vector<double>& a, std::vector<double>& b) {
  const auto n = v.size() / 2;
  a.assign(v.data(), v.data() + n);
  b.assign(v.data() + n, v.data() + 2 * n);
}

// The factorizations work in the interleaved ordering, where the operator is
// banded (bandwidth 2) and any border rows sit at the end, so the natural
// ordering produces no fill beyond the band and the border.
struct SparseFactor::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;  // stacked → interleaved
};

namespace {

Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> interleave_permutation(int n_stacked,
                                                                                     int extra) {
  const int N = n_stacked / 2;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(n_stacked + extra);
  for (int i = 0; i < N; ++i) {
    p.indices()[i] = 2 * i;
    p.indices()[N + i] = 2 * i + 1;
  }
  for (int j = 0; j < extra; ++j) p.indices()[n_stacked + j] = n_stacked + j;
  return p;
}

}  // namespace

SparseFactor::SparseFactor(const Eigen::SparseMatrix<double>& A, int border)
    : impl_(std::make_unique<Impl>()), n_(static_cast<int>(A.rows())) {
  impl_->perm = interleave_permutation(n_ - border, border);
  Eigen::SparseMatrix<double> Ap = impl_->perm * A * impl_->perm.transpose();
  Ap.makeCompressed();
  impl_->lu.setPivotThreshold(1e-3);
  impl_->lu.compute(Ap);
  if (impl_->lu.info() != Eigen::Success) {
    throw Error(ErrorCode::singular, "sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
  }
}

SparseFactor::~SparseFactor() = default;

Eigen::VectorXd SparseFactor::solve(const Eigen::VectorXd& b) const {
  const Eigen::VectorXd bp = impl_->perm * b;
  const Eigen::VectorXd xp = impl_->lu.solve(bp);
  if (impl_->lu.info() != Eigen::Success || !xp.allFinite()) {
    throw Error(ErrorCode::singular, "sparse LU solve failed");
  }
  return impl_->perm.inverse() * xp;
}

BorderedSolver::BorderedSolver(const OperatorMatrix& M, std::vector<Eigen::VectorXd> constraints,
                               double shift)
    : n_(M.dim()), c_(std::move(constraints)) {
  const int m = static_cast<int>(c_.size());
  Eigen::SparseMatrix<double> A = M.to_sparse(shift);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nonZeros() + 2 * static_cast<std::size_t>(m) * n_);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int j = 0; j < m; ++j) {
    if (c_[j].size() != n_) throw Error(ErrorCode::usage, "constraint vector size mismatch");
    for (int i = 0; i < n_; ++i) {
      if (c_[j][i] != 0.0) {
        t.emplace_back(i, n_ + j, c_[j][i]);
        t.emplace_back(n_ + j, i, c_[j][i]);
      }
    }
  }
  Eigen::SparseMatrix<double> B(n_ + m, n_ + m);
  B.setFromTriplets(t.begin(), t.end());
  factor_ = std::make_unique<SparseFactor>(B, m);
}

Eigen::VectorXd BorderedSolver::solve(const Eigen::VectorXd& b) const {
  const int m = static_cast<int>(c_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ + m);
  rhs.head(n_) = b;
  Eigen::VectorXd x = factor_->solve(rhs);
  last_mult_ = x.tail(m);
  return x.head(n_);
}

Eigenpairs smallest_eigs(const OperatorMatrix& M, int k) {
  if (k < 1) throw Error(ErrorCode::usage, "smallest_eigs needs k >= 1");
  const int n = M.dim();
  k = std::min(k, n);
  const BandEigs est = band_eigenvalues(M, 'I', 0.0, 0.0, 1, k);
  if (static_cast<int>(est.values.size()) != k) {
    throw Error(ErrorCode::not_converged, "bisection returned fewer eigenvalues than requested");
  }

  const double scale = std::max(1.0, 4.0 / (M.grid.h * M.grid.h));
  const double target = 1e-8;
  Eigenpairs out;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;

  for (int j = 0; j < k; ++j) {
    const double lam = est.values[j];
    // Accepted vectors whose eigenvalues sit in the same cluster are deflated.
    std::vector<int> cluster;
    for (int i = 0; i < j; ++i) {
      if (std::abs(out.values[i] - lam) < 1e-6 * std::max(1.0, std::abs(lam))) cluster.push_back(i);
    }
    double offset = 1e-10 * scale;
    std::unique_ptr<SparseFactor> factor;
    for (int attempt = 0; attempt < 6 && !factor; ++attempt) {
      try {
        factor = std::make_unique<SparseFactor>(M.to_sparse(lam - offset));
      } catch (const Error&) {
        offset *= 10.0;
      }
    }
    if (!factor) throw Error(ErrorCode::singular, "shift-invert factorization failed at every offset");

    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    double theta = lam;
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 12; ++it) {
      for (int i : cluster) v -= out.vectors[i].dot(v) * out.vectors[i];
      v.normalize();
      v = factor->solve(v);
      for (int i : cluster) v -= out.vectors[i].dot(v) * out.vectors[i];
      v.normalize();
      const Eigen::VectorXd Av = M.apply(v);
      theta = v.dot(Av);
      res = (Av - theta * v).norm();
      if (res <= 0.1 * target && it >= 1) break;
    }
    if (!(res <= target)) {
      std::ostringstream msg;
      msg << "inverse iteration for eigenvalue " << j << " stalled at residual " << res;
      throw Error(ErrorCode::not_converged, msg.str());
    }
    out.values.push_back(theta);
    out.vectors.push_back(v);
    out.residuals.push_back(res);
  }

  // Orthonormalize the final set (clusters may leave tiny overlaps).
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < j; ++i) out.vectors[j] -= out.vectors[i].dot(out.vectors[j]) * out.vectors[i];
    out.vectors[j].normalize();
  }
  return out;
}

int count_below(const OperatorMatrix& M, double threshold) {
  const double lower = M.gershgorin_lower() - 1.0;
  if (threshold <= lower) return 0;
  return static_cast<int>(band_eigenvalues(M, 'V', lower, threshold, 0, 0).values.size());
}

}  // namespace wallforge
