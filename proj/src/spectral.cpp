#include "wallforge/spectral.hpp"

#include "wallforge/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

namespace wallforge {

namespace {

double min_eig(const Mat2& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double d = 0.5 * (m[0][0] - m[1][1]);
  return tr - std::sqrt(d * d + m[0][1] * m[1][0]);
}

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

}  // namespace

OperatorMatrix assemble_Lplus(const PotentialSpec& spec, const RealField2& U) {
  U.validate();
  const int N = U.grid.N;
  OperatorMatrix M{U.grid, "Lplus", std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  for (int i = 0; i < N; ++i) {
    const double u1 = U.u1[i];
    const double u2 = U.u2[i];
    const FDerivatives d = spec.f_derivatives({u1 * u1, u2 * u2});
    M.p1[i] = d.d1[0] + 2.0 * u1 * u1 * d.d2[0][0];
    M.p2[i] = d.d1[1] + 2.0 * u2 * u2 * d.d2[1][1];
    M.coupling[i] = 2.0 * u1 * u2 * d.d2[0][1];
  }
  return M;
}

OperatorMatrix assemble_Lminus(const PotentialSpec& spec, const RealField2& U) {
  U.validate();
  const int N = U.grid.N;
  OperatorMatrix M{U.grid, "Lminus", std::vector<double>(N), std::vector<double>(N),
                   std::vector<double>(N, 0.0)};
  for (int i = 0; i < N; ++i) {
    const Vec2 d = dF_at(spec, {U.u1[i], U.u2[i]});
    M.p1[i] = d[0];
    M.p2[i] = d[1];
  }
  return M;
}

double essential_edge(const PotentialSpec& spec) {
  return 0.5 * std::min(min_eig(hess_W(spec, spec.a_state())), min_eig(hess_W(spec, spec.b_state())));
}

TrialPair TrialPair::constant(double c1, double c2) {
  return {[c1](double) { return c1; }, [](double) { return 0.0; }, [c2](double) { return c2; },
          [](double) { return 0.0; }};
}

TrialPair TrialPair::random_bumps(std::uint64_t seed, int bumps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-5.0, 5.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  struct Bump {
    double c, w, a;
  };
  auto draw = [&] {
    std::vector<Bump> v;
    for (int k = 0; k < bumps; ++k) v.push_back({centre(rng), width(rng), amp(rng)});
    return v;
  };
  const auto b1 = draw();
  const auto b2 = draw();
  auto f = [](std::vector<Bump> bs) {
    return [bs](double x) {
      double s = 0.0;
      for (const auto& b : bs) s += b.a * std::exp(-((x - b.c) * (x - b.c)) / (b.w * b.w));
      return s;
    };
  };
  auto df = [](std::vector<Bump> bs) {
    return [bs](double x) {
      double s = 0.0;
      for (const auto& b : bs) {
        const double z = (x - b.c) / b.w;
        s += -2.0 * b.a * z / b.w * std::exp(-z * z);
      }
      return s;
    };
  };
  return {f(b1), df(b1), f(b2), df(b2)};
}

QuadraticFormCheck quadratic_form_identity_check(const PotentialSpec& spec, const RealField2& U,
                                                 const TrialPair& A, const TrialPair& B) {
  const Grid& g = U.grid;
  const int N = g.N;
  const double h = g.h;
  const RealField2 Up = derivative(U);
  const OperatorMatrix Lp = assemble_Lplus(spec, U);
  const OperatorMatrix Lm = assemble_Lminus(spec, U);
  QuadraticFormCheck q;

  // Discrete quadratic form Σ_edges |Δφ|²/h + hΣ φᵀPφ with given ghosts.
  auto form = [&](const OperatorMatrix& M, const std::vector<double>& f1, const std::vector<double>& f2,
                  const Vec2& left, const Vec2& right) {
    double grad = 0.0;
    for (int c = 0; c < 2; ++c) {
      const auto& f = (c == 0) ? f1 : f2;
      double prev = left[c];
      for (int i = 0; i < N; ++i) {
        grad += (f[i] - prev) * (f[i] - prev);
        prev = f[i];
      }
      grad += (right[c] - prev) * (right[c] - prev);
    }
    double pot = 0.0;
    for (int i = 0; i < N; ++i) {
      pot += M.p1[i] * f1[i] * f1[i] + 2.0 * M.coupling[i] * f1[i] * f2[i] + M.p2[i] * f2[i] * f2[i];
    }
    return grad / h + h * pot;
  };

  // L₊ with Φ_R = (A₁u₁′, A₂u₂′); U′ has decayed at ±L so ghosts are zero.
  std::vector<double> f1(N), f2(N), id(N), mag(N), nrm(N);
  for (int i = 0; i < N; ++i) {
    const double x = g.x(i);
    const double a1 = A.f1(x), a2 = A.f2(x);
    const double da1 = A.df1(x), da2 = A.df2(x);
    f1[i] = a1 * Up.u1[i];
    f2[i] = a2 * Up.u2[i];
    const double t1 = da1 * da1 * Up.u1[i] * Up.u1[i];
    const double t2 = da2 * da2 * Up.u2[i] * Up.u2[i];
    const double t3 = -Lp.coupling[i] * Up.u1[i] * Up.u2[i] * (a1 - a2) * (a1 - a2);
    id[i] = t1 + t2 + t3;
    mag[i] = t1 + t2 + std::abs(t3);
    nrm[i] = f1[i] * f1[i] + f2[i] * f2[i];
  }
  q.lplus_direct = form(Lp, f1, f2, {0.0, 0.0}, {0.0, 0.0});
  q.lplus_identity = g.integrate(id);
  q.lplus_scale = std::max({g.integrate(mag), g.integrate(nrm), 1e-300});
  q.lplus_defect = std::abs(q.lplus_direct - q.lplus_identity) / q.lplus_scale;

  // L₋ with Φ_I = (B₁u₁, B₂u₂), ghosts continued by the wall's boundary values.
  for (int i = 0; i < N; ++i) {
    const double x = g.x(i);
    f1[i] = B.f1(x) * U.u1[i];
    f2[i] = B.f2(x) * U.u2[i];
    const double t1 = B.df1(x) * U.u1[i];
    const double t2 = B.df2(x) * U.u2[i];
    id[i] = t1 * t1 + t2 * t2;
    nrm[i] = f1[i] * f1[i] + f2[i] * f2[i];
  }
  const Vec2 left{B.f1(-g.L) * U.left_bc[0], B.f2(-g.L) * U.left_bc[1]};
  const Vec2 right{B.f1(g.L) * U.right_bc[0], B.f2(g.L) * U.right_bc[1]};
  q.lminus_direct = form(Lm, f1, f2, left, right);
  auto id_end = [&](double x, const Vec2& u) {
    const double t1 = B.df1(x) * u[0];
    const double t2 = B.df2(x) * u[1];
    return t1 * t1 + t2 * t2;
  };
  q.lminus_identity = g.integrate(id, id_end(-g.L, U.left_bc), id_end(g.L, U.right_bc));
  q.lminus_scale = std::max({std::abs(q.lminus_identity), g.integrate(nrm), 1e-300});
  q.lminus_defect = std::abs(q.lminus_direct - q.lminus_identity) / q.lminus_scale;
  return q;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
  }
  return "unknown";
}

PencilResult min_pencil(const VecFn& apply_A, const VecFn& apply_B, const VecFn& precond,
                        const VecFn& project, const Eigen::VectorXd& x0, double tol, int max_iter) {
  PencilResult out;
  Eigen::VectorXd x = project(x0);
  if (!(x.norm() > 0.0)) throw Error(ErrorCode::usage, "min_pencil: start vector projects to zero");
  x.normalize();
  Eigen::VectorXd p;
  double mu = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ax = apply_A(x);
    const Eigen::VectorXd Bx = apply_B(x);
    mu = x.dot(Ax) / x.dot(Bx);
    const Eigen::VectorXd r = project(Ax - mu * Bx);
    const double denom = std::max({Ax.norm(), std::abs(mu) * Bx.norm(), 1e-300});
    out.residual = r.norm() / denom;
    out.iterations = it;
    if (out.residual <= tol) break;

    // Rayleigh–Ritz on span{x, T r, p} with a Euclidean-orthonormal basis.
    std::vector<Eigen::VectorXd> cols{x, project(precond(r))};
    if (p.size() == x.size()) cols.push_back(p);
    std::vector<Eigen::VectorXd> basis;
    for (auto c : cols) {
      for (const auto& b : basis) c -= b.dot(c) * b;
      for (const auto& b : basis) c -= b.dot(c) * b;
      const double n = c.norm();
      if (n > 1e-12) basis.push_back(c / n);
    }
    const int m = static_cast<int>(basis.size());
    std::vector<Eigen::VectorXd> AS, BS;
    for (const auto& b : basis) {
      AS.push_back(apply_A(b));
      BS.push_back(apply_B(b));
    }
    Eigen::MatrixXd a(m, m), bm(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        a(i, j) = 0.5 * (basis[i].dot(AS[j]) + basis[j].dot(AS[i]));
        bm(i, j) = 0.5 * (basis[i].dot(BS[j]) + basis[j].dot(BS[i]));
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, bm);
    if (ges.info() != Eigen::Success) {
      throw Error(ErrorCode::not_converged, "min_pencil: Rayleigh-Ritz step failed (B not definite)");
    }
    const Eigen::VectorXd c = ges.eigenvectors().col(0);
    Eigen::VectorXd xn = Eigen::VectorXd::Zero(x.size());
    for (int i = 0; i < m; ++i) xn += c[i] * basis[i];
    // New search direction: the part of the update outside the old iterate.
    p = xn - x.dot(xn) * x;
    const double pn = p.norm();
    if (pn > 0.0) p /= pn;
    x = project(xn);
    x.normalize();
    out.iterations = it + 1;
  }
  out.value = mu;
  out.vector = x;
  return out;
}

SpectralReport stability_spectrum(const PotentialSpec& spec, const RealField2& U,
                                  const SpectralOptions& opts) {
  SpectralReport rep;
  const OperatorMatrix Lp = assemble_Lplus(spec, U);
  const OperatorMatrix Lm = assemble_Lminus(spec, U);
  const int k = std::max(2, opts.k);
  const Eigenpairs ep = smallest_eigs(Lp, k);
  const Eigenpairs em = smallest_eigs(Lm, k);
  rep.lplus_eigs = ep.values;
  rep.lminus_eigs = em.values;
  rep.lplus_residuals = ep.residuals;
  rep.lminus_residuals = em.residuals;
  rep.lplus_vectors = ep.vectors;
  rep.lminus_vectors = em.vectors;
  rep.essential_edge = essential_edge(spec);
  rep.gap = ep.values[1] - ep.values[0];

  Eigen::VectorXd up = stack(derivative(U));
  const double upn = up.norm();
  rep.lplus_uprime_residual = Lp.apply(up).norm() / upn;
  up /= upn;

  Eigen::VectorXd g = ep.vectors[0];
  const int N = U.grid.N;
  if (g.head(N).sum() < 0.0) g = -g;
  rep.zero_mode_overlap = std::abs(g.dot(up));
  // Sign structure of the ground state: φ₁ > 0 > φ₂ wherever it is resolved.
  const double floor = 1e-12 * g.cwiseAbs().maxCoeff();
  rep.ground_state_signed = true;
  for (int i = 0; i < N; ++i) {
    if (g[i] < -floor || g[N + i] > floor) rep.ground_state_signed = false;
  }
  rep.ground_vector.assign(g.data(), g.data() + g.size());

  if (!(ep.values[1] > 0.0)) {
    std::ostringstream msg;
    msg << "L+ is indefinite on the complement of its ground state (lambda_1 = " << ep.values[1] << ")";
    throw Error(ErrorCode::degenerate, msg.str());
  }

  // The translation mode is the exact discrete ground state of L₊, so L₊⁻¹
  // on its complement is a bordered solve with no residual multiplier.
  const std::vector<Eigen::VectorXd> border{g};
  const BorderedSolver lplus_inv(Lp, border);
  const BorderedSolver lminus_inv(Lm, border);
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v - g.dot(v) * g; };
  auto apply_A = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return project(Lm.apply(project(v))); };
  auto apply_B = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return project(lplus_inv.solve(project(v))); };
  auto precond = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return lminus_inv.solve(project(v)); };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x0 = stack(U);
  for (int i = 0; i < x0.size(); ++i) x0[i] += 1e-3 * gauss(rng);
  const PencilResult pr = min_pencil(apply_A, apply_B, precond, project, x0, 1e-8, 500);
  rep.neg_lambda_sq = pr.value;
  rep.pencil_iterations = pr.iterations;
  rep.pencil_residual = pr.residual;

  rep.denominator_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opts.denominator_samples; ++s) {
    Eigen::VectorXd phi(Lp.dim());
    for (int i = 0; i < phi.size(); ++i) phi[i] = gauss(rng);
    phi = project(phi);
    const double q = phi.dot(apply_B(phi)) / phi.squaredNorm();
    rep.denominator_min = std::min(rep.denominator_min, q);
  }
  if (opts.denominator_samples <= 0) rep.denominator_min = 0.0;

  if (rep.gap < opts.min_gap) {
    rep.verdict = Verdict::marginal;
  } else {
    rep.verdict = (rep.neg_lambda_sq >= -opts.stability_tol) ? Verdict::stable : Verdict::unstable;
  }
  return rep;
}

DenseSpectrum dense_linearized_spectrum(const PotentialSpec& spec, const RealField2& U,
                                        const Eigen::VectorXd& translation_mode) {
  const OperatorMatrix Lp = assemble_Lplus(spec, U);
  const OperatorMatrix Lm = assemble_Lminus(spec, U);
  const int n = Lp.dim();
  if (n > 4000) throw Error(ErrorCode::usage, "dense spectrum is meant for coarse grids (2N <= 4000)");
  const Eigen::MatrixXd P = Eigen::MatrixXd(Lp.to_sparse());
  const Eigen::MatrixXd M = Eigen::MatrixXd(Lm.to_sparse());
  // L₊Φ_R = −λΦ_I, L₋Φ_I = λΦ_R  ⇒  L₋L₊Φ_R = −λ²Φ_R.
  Eigen::EigenSolver<Eigen::MatrixXd> es(M * P, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::not_converged, "dense eigensolver failed");
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();

  int drop = 0;
  double best = -1.0;
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXcd v = vecs.col(j);
    const double ov = std::abs(v.dot(translation_mode.cast<std::complex<double>>())) / v.norm();
    if (ov > best) {
      best = ov;
      drop = j;
    }
  }
  DenseSpectrum out;
  out.translation_value = vals[drop].real();
  for (int j = 0; j < n; ++j) {
    out.max_imag = std::max(out.max_imag, std::abs(vals[j].imag()));
    if (j != drop) out.neg_lambda_sq.push_back(vals[j].real());
  }
  std::sort(out.neg_lambda_sq.begin(), out.neg_lambda_sq.end());
  out.min_value = out.neg_lambda_sq.empty() ? 0.0 : out.neg_lambda_sq.front();
  return out;
}

}  // namespace wallforge
