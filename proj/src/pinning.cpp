#include "wallforge/pinning.hpp"

#include "wallforge/error.hpp"
#include "wallforge/linalg.hpp"
#include "wallforge/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wallforge {

namespace {

// Natural cubic spline second derivatives for knots x and values y.
std::vector<double> spline_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1];
    const double hr = x[i + 1] - x[i];
    const double diag = 2.0 * (hl + hr);
    const double rhs = 6.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
    const double den = diag - hl * c[i - 1];
    c[i] = hr / den;
    d[i] = (rhs - hl * d[i - 1]) / den;
  }
  for (std::size_t i = n - 1; i-- > 1;) m[i] = d[i] - c[i] * m[i + 1];
  return m;
}

// Value at node i of the eighth-order centred derivative, continuing the
// field by its boundary values outside the grid.
std::vector<double> derivative8(const Grid& g, const std::vector<double>& f, double left, double right) {
  static constexpr double w[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const int N = g.N;
  auto at = [&](int i) {
    if (i < 0) return left;
    if (i >= N) return right;
    return f[i];
  };
  std::vector<double> d(N);
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += w[k] * (at(i + k + 1) - at(i - k - 1));
    d[i] = acc / g.h;
  }
  return d;
}

double equilibrium_level(const RealField2& wall0) {
  const double a2 = wall0.right_bc[0] * wall0.right_bc[0];
  const double b2 = wall0.left_bc[1] * wall0.left_bc[1];
  if (std::abs(a2 - b2) > 1e-12 * std::max(1.0, a2)) {
    throw Error(ErrorCode::unsupported,
                "pinning analysis needs equilibria of equal modulus (|a| = |b|)");
  }
  return a2;
}

// d(x) = u₁² + u₂² − a² at the nodes.
std::vector<double> density(const RealField2& U) {
  const double level = equilibrium_level(U);
  std::vector<double> d(U.u1.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = U.u1[i] * U.u1[i] + U.u2[i] * U.u2[i] - level;
  return d;
}

double symmetric_defect(const RealField2& U) {
  const int N = U.grid.N;
  double d = 0.0;
  for (int i = 0; i < N; ++i) d = std::max(d, std::abs(U.u2[i] - U.u1[N - 1 - i]));
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// LocalizedPotential

double LocalizedPotential::Spline::eval(double t, int order) const {
  const std::size_t n = x.size();
  if (n < 2 || t < x.front() || t > x.back()) return 0.0;
  std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1);
  const double h = x[k] - x[k - 1];
  const double A = (x[k] - t) / h;
  const double B = (t - x[k - 1]) / h;
  switch (order) {
    case 0:
      return A * y[k - 1] + B * y[k] + ((A * A * A - A) * m[k - 1] + (B * B * B - B) * m[k]) * h * h / 6.0;
    case 1:
      return (y[k] - y[k - 1]) / h + ((1.0 - 3.0 * A * A) * m[k - 1] + (3.0 * B * B - 1.0) * m[k]) * h / 6.0;
    default:
      return A * m[k - 1] + B * m[k];
  }
}

LocalizedPotential LocalizedPotential::sech2(double a, double b, double center) {
  if (!(b > 0.0) || !std::isfinite(a) || !std::isfinite(center)) {
    throw Error(ErrorCode::domain, "sech2 potential needs finite a, center and width b > 0");
  }
  LocalizedPotential V;
  V.kind_ = Kind::sech2;
  V.a_ = a;
  V.b_ = b;
  V.c_ = center;
  return V;
}

LocalizedPotential LocalizedPotential::zero() { return sech2(0.0, 1.0); }

LocalizedPotential LocalizedPotential::tabulated(std::vector<double> x, std::vector<double> v,
                                                 std::vector<double> dv, std::vector<double> d2v) {
  if (x.size() < 4 || v.size() != x.size()) {
    throw Error(ErrorCode::usage, "tabulated potential needs at least four (x, V) samples");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::usage, "tabulated potential: x must increase");
  }
  if ((!dv.empty() && dv.size() != x.size()) || (!d2v.empty() && d2v.size() != x.size())) {
    throw Error(ErrorCode::usage, "tabulated potential: derivative tables must match x");
  }
  LocalizedPotential V;
  V.kind_ = Kind::tabulated;
  V.v_ = {x, v, spline_moments(x, v)};
  if (!dv.empty()) {
    V.dv_ = {x, dv, spline_moments(x, dv)};
    V.has_dv_ = true;
  }
  if (!d2v.empty()) {
    V.d2v_ = {x, d2v, spline_moments(x, d2v)};
    V.has_d2v_ = true;
  }
  V.spline_derivatives_ = !(V.has_dv_ && V.has_d2v_);
  return V;
}

double LocalizedPotential::value(double x) const {
  const double t = x - c_;
  if (kind_ == Kind::sech2) {
    const double s = 1.0 / std::cosh(b_ * t);
    return scale_ * a_ * s * s;
  }
  return scale_ * v_.eval(t, 0);
}

double LocalizedPotential::d1(double x) const {
  const double t = x - c_;
  if (kind_ == Kind::sech2) {
    const double s = 1.0 / std::cosh(b_ * t);
    return -2.0 * scale_ * a_ * b_ * s * s * std::tanh(b_ * t);
  }
  return scale_ * (has_dv_ ? dv_.eval(t, 0) : v_.eval(t, 1));
}

double LocalizedPotential::d2(double x) const {
  const double t = x - c_;
  if (kind_ == Kind::sech2) {
    const double s2 = 1.0 / (std::cosh(b_ * t) * std::cosh(b_ * t));
    const double th = std::tanh(b_ * t);
    return 2.0 * scale_ * a_ * b_ * b_ * s2 * (3.0 * th * th - 1.0);
  }
  if (has_d2v_) return scale_ * d2v_.eval(t, 0);
  return scale_ * (has_dv_ ? dv_.eval(t, 1) : v_.eval(t, 2));
}

std::vector<double> LocalizedPotential::sample(const Grid& g, double shift) const {
  std::vector<double> out(g.N);
  for (int i = 0; i < g.N; ++i) out[i] = value(g.x(i) + shift);
  return out;
}

LocalizedPotential LocalizedPotential::scaled(double s) const {
  LocalizedPotential V = *this;
  V.scale_ *= s;
  return V;
}

LocalizedPotential LocalizedPotential::shifted(double c) const {
  LocalizedPotential V = *this;
  V.c_ += c;
  return V;
}

std::string LocalizedPotential::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::sech2) {
    os << "sech2(a=" << scale_ * a_ << ", b=" << b_ << ", center=" << c_ << ")";
  } else {
    os << "tabulated(" << v_.x.size() << " samples, scale=" << scale_ << ", center=" << c_ << ")";
  }
  return os.str();
}

std::vector<std::string> LocalizedPotential::check(const Grid& g) const {
  std::vector<std::string> warnings;
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    if (!std::isfinite(value(x)) || !std::isfinite(d1(x)) || !std::isfinite(d2(x))) {
      throw Error(ErrorCode::non_finite, "potential or its derivatives are not finite on the grid");
    }
  }
  const double tail = std::max(std::abs(value(-g.L)), std::abs(value(g.L)));
  if (tail > 1e-10) {
    std::ostringstream msg;
    msg << "potential is not localized on the domain: |V(+-L)| = " << tail << " > 1e-10";
    throw Error(ErrorCode::domain, msg.str());
  }
  if (kind_ == Kind::tabulated) {
    warnings.push_back("tabulated potential: integrability (V in L1) is checked on the grid only");
    if (spline_derivatives_) {
      warnings.push_back("tabulated potential: derivatives come from the cubic spline; V'' is only "
                         "second-order accurate in the table spacing");
    }
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Pinning point and stability index

double pinning_function(const LocalizedPotential& V, const RealField2& wall0, double s) {
  const std::vector<double> d = density(wall0);
  const Grid& g = wall0.grid;
  std::vector<double> f(g.N);
  for (int i = 0; i < g.N; ++i) f[i] = V.d1(g.x(i) + s) * d[i];
  return g.integrate(f);
}

PinningPoint find_x0(const LocalizedPotential& V, const RealField2& wall0) {
  const Grid& g = wall0.grid;
  const std::vector<double> d = density(wall0);
  auto f = [&](double s) {
    std::vector<double> v(g.N);
    for (int i = 0; i < g.N; ++i) v[i] = V.d1(g.x(i) + s) * d[i];
    return g.integrate(v);
  };
  constexpr int kIntervals = 64;
  constexpr double kTol = 1e-10;
  const double lo = -0.5 * g.L;
  const double step = g.L / kIntervals;
  std::vector<double> s(kIntervals + 1), fs(kIntervals + 1);
  double fmax = 0.0;
  for (int k = 0; k <= kIntervals; ++k) {
    s[k] = lo + k * step;
    fs[k] = f(s[k]);
    fmax = std::max(fmax, std::abs(fs[k]));
  }
  // Scale of the integrand, to recognise an identically vanishing f.
  double scale = 0.0;
  for (int i = 0; i < g.N; ++i) scale = std::max(scale, std::abs(V.d1(g.x(i))));
  if (fmax <= 1e-14 * std::max(scale, 1e-300) || fmax == 0.0) {
    throw Error(ErrorCode::degenerate,
                "pinning function vanishes identically; the non-degeneracy condition cannot be verified");
  }

  std::vector<double> roots;
  for (int k = 0; k < kIntervals; ++k) {
    double a = s[k], b = s[k + 1], fa = fs[k], fb = fs[k + 1];
    if (std::abs(fa) <= kTol) {
      if (roots.empty() || std::abs(roots.back() - a) > 0.5 * step) roots.push_back(a);
      continue;
    }
    if (fa * fb >= 0.0) continue;
    // Illinois-modified secant (regula falsi) keeps the bracket.
    double x = a;
    int side = 0;
    for (int it = 0; it < 200; ++it) {
      x = (a * fb - b * fa) / (fb - fa);
      const double fx = f(x);
      if (std::abs(fx) <= kTol * 1e-2 || b - a < 1e-14) break;
      if (fx * fb < 0.0) {
        a = b;
        fa = fb;
        b = x;
        fb = fx;
        side = 0;
      } else {
        b = x;
        fb = fx;
        if (side == -1) fa *= 0.5;
        side = -1;
      }
      if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
      }
    }
    roots.push_back(x);
  }
  if (std::abs(fs.back()) <= kTol) roots.push_back(s.back());
  if (roots.empty()) {
    throw Error(ErrorCode::no_pinning_point, "pinning function has no sign change on [-L/2, L/2]");
  }
  std::sort(roots.begin(), roots.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
  PinningPoint out;
  out.x0 = roots.front();
  out.residual = std::abs(f(out.x0));
  out.other_roots.assign(roots.begin() + 1, roots.end());
  if (out.residual > kTol) {
    std::ostringstream msg;
    msg << "pinning point refinement stalled at |f| = " << out.residual;
    throw Error(ErrorCode::not_converged, msg.str());
  }
  return out;
}

SigmaResult compute_sigma(const LocalizedPotential& V, double x0, const RealField2& wall0) {
  const Grid& g = wall0.grid;
  const std::vector<double> d = density(wall0);
  const std::vector<double> du1 = derivative8(g, wall0.u1, wall0.left_bc[0], wall0.right_bc[0]);
  const std::vector<double> du2 = derivative8(g, wall0.u2, wall0.left_bc[1], wall0.right_bc[1]);
  std::vector<double> f(g.N), q(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i) + x0;
    f[i] = 0.5 * V.d2(x) * d[i];
    q[i] = -V.d1(x) * (wall0.u1[i] * du1[i] + wall0.u2[i] * du2[i]);
  }
  SigmaResult r;
  r.sigma = g.integrate(f);
  r.sigma_ibp = g.integrate(q);
  r.rel_defect = std::abs(r.sigma - r.sigma_ibp) / std::max(std::abs(r.sigma), 1e-300);
  if (std::abs(r.sigma) < 1e-10) {
    throw Error(ErrorCode::marginal,
                "stability index vanishes: the second pinning condition fails (sigma ~ 0)");
  }
  return r;
}

double uprime_norm_sq(const RealField2& wall0) {
  const Grid& g = wall0.grid;
  const auto d1 = derivative8(g, wall0.u1, wall0.left_bc[0], wall0.right_bc[0]);
  const auto d2 = derivative8(g, wall0.u2, wall0.left_bc[1], wall0.right_bc[1]);
  std::vector<double> f(g.N);
  for (int i = 0; i < g.N; ++i) f[i] = d1[i] * d1[i] + d2[i] * d2[i];
  return g.integrate(f);
}

RealField2 first_order_correction(const PotentialSpec& spec, const LocalizedPotential& V,
                                  const RealField2& wall0, double x0) {
  const Grid& g = wall0.grid;
  const int N = g.N;
  const OperatorMatrix Lp = assemble_Lplus(spec, wall0);
  Eigen::VectorXd up = stack(derivative8(g, wall0.u1, wall0.left_bc[0], wall0.right_bc[0]),
                             derivative8(g, wall0.u2, wall0.left_bc[1], wall0.right_bc[1]));
  up.normalize();
  Eigen::VectorXd rhs(2 * N);
  for (int i = 0; i < N; ++i) {
    const double v = V.value(g.x(i) + x0);
    rhs[i] = -v * wall0.u1[i];
    rhs[N + i] = -v * wall0.u2[i];
  }
  RealField2 W = RealField2::zeros(g, {0.0, 0.0}, {0.0, 0.0});
  if (rhs.lpNorm<Eigen::Infinity>() == 0.0) return W;
  const BorderedSolver solver(Lp, {up});
  Eigen::VectorXd w = solver.solve(rhs);
  w -= up.dot(w) * up;  // the constraint holds to rounding; remove the residue
  unstack(w, W.u1, W.u2);
  return W;
}

SigmaConsistency sigma_consistency(const PotentialSpec& spec, const LocalizedPotential& V,
                                   const RealField2& wall0, const RealField2& W, double x0) {
  const Grid& g = wall0.grid;
  const auto d1 = derivative8(g, wall0.u1, wall0.left_bc[0], wall0.right_bc[0]);
  const auto d2 = derivative8(g, wall0.u2, wall0.left_bc[1], wall0.right_bc[1]);
  std::vector<double> f(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double v = V.value(g.x(i) + x0);
    const Tensor3 T = third_W(spec, wall0.at(i));
    const double w[2] = {W.u1[i], W.u2[i]};
    const double p[2] = {d1[i], d2[i]};
    double quad = v * (p[0] * p[0] + p[1] * p[1]);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int c = 0; c < 2; ++c) quad += 0.5 * T[a][b][c] * w[c] * p[a] * p[b];
      }
    }
    f[i] = quad;
  }
  SigmaConsistency out;
  out.sigma_quadratic = g.integrate(f);
  const std::vector<double> d = density(wall0);
  std::vector<double> s(g.N);
  for (int i = 0; i < g.N; ++i) s[i] = 0.5 * V.d2(g.x(i) + x0) * d[i];
  out.sigma_formula = g.integrate(s);
  out.rel_defect = std::abs(out.sigma_quadratic - out.sigma_formula) /
                   std::max(std::abs(out.sigma_formula), 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Pinned branch

namespace {

RealField2 pinned_residual(const PotentialSpec& spec, const RealField2& U, const std::vector<double>& eV) {
  RealField2 R = el_residual(spec, U);
  for (std::size_t i = 0; i < eV.size(); ++i) {
    R.u1[i] += eV[i] * U.u1[i];
    R.u2[i] += eV[i] * U.u2[i];
  }
  return R;
}

double sup_of(const RealField2& R) { return sup_norm(R); }

// Damped Newton at fixed ε. Returns false if it fails to reach tol.
bool pinned_newton(const PotentialSpec& spec, RealField2& U, const std::vector<double>& eV, double tol,
                   int max_iter, int& iterations) {
  const int N = U.grid.N;
  RealField2 R = pinned_residual(spec, U, eV);
  double r = sup_of(R);
  for (int it = 0; it < max_iter; ++it) {
    if (r <= tol) return true;
    const OperatorMatrix J = assemble_Lplus(spec, U).with_added_potential(eV, "L+(eps)");
    Eigen::VectorXd delta;
    try {
      const SparseFactor lu(J.to_sparse());
      delta = lu.solve(-stack(R));
    } catch (const Error&) {
      return false;
    }
    double step = 1.0;
    bool accepted = false;
    while (step >= 1.0 / 64.0) {
      RealField2 T = U;
      for (int i = 0; i < N; ++i) {
        T.u1[i] += step * delta[i];
        T.u2[i] += step * delta[N + i];
      }
      RealField2 RT = pinned_residual(spec, T, eV);
      const double rt = sup_of(RT);
      if (std::isfinite(rt) && rt < r) {
        U = std::move(T);
        R = std::move(RT);
        r = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    if (!accepted) return r <= tol;
  }
  return r <= tol;
}

}  // namespace

PinningReport solve_pinned_wall(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                                const RealField2& wall0, double x0, const PinningOptions& opts) {
  wall0.validate();
  if (std::abs(eps) > opts.eps_max) {
    std::ostringstream msg;
    msg << "|eps| = " << std::abs(eps) << " exceeds the perturbative limit eps_max = " << opts.eps_max;
    throw Error(ErrorCode::domain, msg.str());
  }
  V.check(wall0.grid);
  PinningReport rep;
  rep.x0 = x0;
  rep.eps = eps;
  rep.sigma = compute_sigma(V, x0, wall0).sigma;  // throws when σ ≈ 0

  const RealField2 base = translate(wall0, x0);
  const std::vector<double> v = V.sample(wall0.grid);

  auto solve_at = [&](double e, RealField2 start, int& iters, int& cont) {
    if (e == 0.0) return start;
    // Natural continuation: on failure halve the step in ε and retry.
    double reached = 0.0;
    double target = e;
    for (int depth = 0; depth <= opts.max_halvings;) {
      std::vector<double> eV(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) eV[i] = target * v[i];
      RealField2 trial = start;
      if (pinned_newton(spec, trial, eV, opts.tol, opts.max_newton, iters)) {
        start = std::move(trial);
        reached = target;
        if (reached == e) return start;
        target = e;
        ++cont;
        continue;
      }
      target = reached + 0.5 * (target - reached);
      ++depth;
      ++cont;
    }
    std::ostringstream msg;
    msg << "pinned Newton failed to converge at eps = " << e << " even with continuation";
    throw Error(ErrorCode::not_converged, msg.str());
  };

  rep.pinned_profile = solve_at(eps, base, rep.newton_iterations, rep.continuation_steps);
  rep.residual_sup = [&] {
    std::vector<double> eV(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) eV[i] = eps * v[i];
    return sup_norm(pinned_residual(spec, rep.pinned_profile, eV));
  }();
  rep.persistence_sup = sup_distance(rep.pinned_profile, base);
  rep.symmetric_defect = symmetric_defect(rep.pinned_profile);
  if (opts.ratio_check && eps != 0.0) {
    int it = 0, cont = 0;
    const RealField2 half = solve_at(0.5 * eps, base, it, cont);
    const double ph = sup_distance(half, base);
    rep.persistence_ratio = ph > 0.0 ? rep.persistence_sup / ph : std::numeric_limits<double>::infinity();
  }
  return rep;
}

void pinned_spectrum(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                     PinningReport& rep, const PinningOptions& opts) {
  const RealField2& U = rep.pinned_profile;
  std::vector<double> eV = V.sample(U.grid);
  for (double& x : eV) x *= eps;
  const OperatorMatrix Lp = assemble_Lplus(spec, U).with_added_potential(eV, "L+(eps)");
  const OperatorMatrix Lm = assemble_Lminus(spec, U).with_added_potential(eV, "L-(eps)");
  const Eigenpairs ep = smallest_eigs(Lp, 2);
  const Eigenpairs em = smallest_eigs(Lm, 1);
  rep.lplus_min_eig = ep.values[0];
  rep.lminus_min_eig = em.values[0];
  rep.lplus_negative_count = count_below(Lp, 0.0);
  rep.predicted_shift = eps * rep.sigma / uprime_norm_sq(U);

  if (!(rep.lminus_min_eig > 0.0)) {
    throw Error(ErrorCode::degenerate, "L-(eps) is not positive on the truncated domain");
  }
  // L₋Φ = −λ²L₊⁻¹Φ ⇔ L₊Ψ = −λ²L₋⁻¹Ψ with Ψ = L₊⁻¹Φ; L₋⁻¹ is positive, so
  // the pencil is definite and its inertia equals that of L₊(ε).
  const SparseFactor lminus(Lm.to_sparse());
  const double shift = 0.05 + std::max(0.0, -2.0 * rep.lplus_min_eig);
  const SparseFactor precond_lu(Lp.to_sparse(-shift));
  auto apply_A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Lp.apply(x); };
  auto apply_B = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return lminus.solve(x); };
  auto precond = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return precond_lu.solve(x); };
  auto identity = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  const PencilResult pr = min_pencil(apply_A, apply_B, precond, identity, ep.vectors[0], 1e-8, 500);
  rep.neg_lambda_sq = pr.value;
  rep.pencil_iterations = pr.iterations;
  rep.verdict = rep.neg_lambda_sq >= -opts.stability_tol ? Verdict::stable : Verdict::unstable;
}

PinningReport run_pinning(const PotentialSpec& spec, const LocalizedPotential& V, double eps,
                          const RealField2& wall0, const PinningOptions& opts) {
  const PinningPoint p = find_x0(V, wall0);
  PinningReport rep = solve_pinned_wall(spec, V, eps, wall0, p.x0, opts);
  pinned_spectrum(spec, V, eps, rep, opts);
  return rep;
}

}  // namespace wallforge
