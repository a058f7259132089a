#include "wallforge/profile.hpp"

#include "wallforge/error.hpp"
#include "wallforge/linalg.hpp"
#include "wallforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wallforge {

namespace {

double residual_l2(const RealField2& R) {
  double acc = 0.0;
  for (std::size_t i = 0; i < R.u1.size(); ++i) acc += R.u1[i] * R.u1[i] + R.u2[i] * R.u2[i];
  return std::sqrt(acc);
}

// Rates √(½∂ⱼ²W) at the equilibria for the four tails.
struct PredictedRates {
  double left_u1, right_u1, left_u2, right_u2;
};

PredictedRates predicted_rates(const PotentialSpec& spec) {
  const Mat2 Ha = hess_W(spec, spec.a_state());
  const Mat2 Hb = hess_W(spec, spec.b_state());
  auto r = [](double v) { return std::sqrt(std::max(0.0, 0.5 * v)); };
  return {r(Hb[0][0]), r(Ha[0][0]), r(Hb[1][1]), r(Ha[1][1])};
}

}  // namespace

RealField2 initial_guess(const PotentialSpec& spec, const Grid& grid) {
  const double a = spec.a_state()[0];
  const double b = spec.b_state()[1];
  return RealField2::sample(grid, spec.b_state(), spec.a_state(), [&](double x) {
    const double t = std::tanh(x);
    return Vec2{0.5 * a * (1.0 + t), 0.5 * b * (1.0 - t)};
  });
}

FlowResult gradient_flow(const PotentialSpec& spec, const RealField2& U0, double dt, int steps,
                         bool record_energies) {
  const double h = U0.grid.h;
  if (!(dt > 0.0) || dt > 0.25 * h * h * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "gradient_flow needs 0 < dt <= h^2/4 = " << 0.25 * h * h << " (got " << dt << ")";
    throw Error(ErrorCode::usage, msg.str());
  }
  if (steps < 0) throw Error(ErrorCode::usage, "gradient_flow needs steps >= 0");

  FlowResult out{U0, 0, 0, dt, {}};
  double E = energy(spec, out.field);
  if (record_energies) out.energies.push_back(E);
  RealField2 trial = out.field;
  const double dt_min = 1e-12 * h * h;
  while (out.accepted < steps) {
    const RealField2 R = el_residual(spec, out.field);
    for (std::size_t i = 0; i < trial.u1.size(); ++i) {
      trial.u1[i] = out.field.u1[i] - out.dt * R.u1[i];
      trial.u2[i] = out.field.u2[i] - out.dt * R.u2[i];
    }
    const double E_new = energy(spec, trial);
    // Equality up to rounding counts as non-increase, so fixed points are stable.
    if (E_new <= E + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(E)) {
      std::swap(out.field, trial);
      E = E_new;
      ++out.accepted;
      if (record_energies) out.energies.push_back(E);
    } else {
      ++out.rejected;
      out.dt *= 0.5;
      if (out.dt < dt_min) throw Error(ErrorCode::not_converged, "gradient_flow: step size underflow");
    }
  }
  return out;
}

double crossing_position(const RealField2& U) {
  const Grid& g = U.grid;
  const int N = g.N;
  auto d = [&](int k) {
    if (k < 0) return U.left_bc[0] - U.left_bc[1];
    if (k >= N) return U.right_bc[0] - U.right_bc[1];
    return U.u1[k] - U.u2[k];
  };
  int changes = 0;
  int where = -2;
  for (int k = -1; k < N; ++k) {
    const double a = d(k);
    const double b = d(k + 1);
    if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0)) {
      if (!(a == 0.0 && k > -1 && d(k - 1) == 0.0)) ++changes;
      where = k;
    }
  }
  if (changes != 1) {
    std::ostringstream msg;
    msg << "u1 - u2 changes sign " << changes << " times (expected exactly once)";
    throw Error(ErrorCode::no_crossing, msg.str());
  }
  std::vector<double> diff(N);
  for (int i = 0; i < N; ++i) diff[i] = d(i);
  auto f = [&](double x) { return interpolate(g, diff, d(-1), d(N), x); };
  double lo = -g.L + (where + 1) * g.h;
  double hi = lo + g.h;
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double wall_mass(const PotentialSpec& spec, const RealField2& U) {
  const Vec2 w = spec.mass_weights();
  const double mu = spec.coeffs().mu;
  std::vector<double> f(U.grid.N);
  for (int i = 0; i < U.grid.N; ++i) f[i] = w[0] * U.u1[i] * U.u1[i] + w[1] * U.u2[i] * U.u2[i] - mu;
  auto edge = [&](const Vec2& v) { return w[0] * v[0] * v[0] + w[1] * v[1] * v[1] - mu; };
  return U.grid.integrate(f, edge(U.left_bc), edge(U.right_bc));
}

double mass_center(const PotentialSpec& spec, const RealField2& U) {
  const Vec2 w = spec.mass_weights();
  const double mu = spec.coeffs().mu;
  const Grid& g = U.grid;
  std::vector<double> f(g.N);
  for (int i = 0; i < g.N; ++i) {
    f[i] = g.x(i) * (w[0] * U.u1[i] * U.u1[i] + w[1] * U.u2[i] * U.u2[i] - mu);
  }
  auto edge = [&](const Vec2& v, double x) { return x * (w[0] * v[0] * v[0] + w[1] * v[1] * v[1] - mu); };
  const double num = g.integrate(f, edge(U.left_bc, -g.L), edge(U.right_bc, g.L));
  const double m = wall_mass(spec, U);
  if (std::abs(m) < 1e-300) throw Error(ErrorCode::degenerate, "wall mass m(U) vanishes");
  return num / m;
}

CenterResult normalize_center(const PotentialSpec& spec, const RealField2& U) {
  const double xc = crossing_position(U);
  CenterResult out{translate(U, -xc), xc, 0.0};
  out.mass_shift = mass_center(spec, out.profile);
  return out;
}

DecayFit fit_decay(const Grid& g, const std::vector<double>& v, double center, bool left_tail,
                   double lo, double hi) {
  DecayFit fit;
  Eigen::MatrixXd A;
  std::vector<std::array<double, 4>> rows;
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    if (left_tail ? (x >= center) : (x <= center)) continue;
    if (!(v[i] >= lo && v[i] <= hi)) continue;
    const double X = std::abs(x - center);
    if (X <= 0.0) continue;
    rows.push_back({1.0, x, std::log(X), std::log(v[i])});
  }
  fit.points = static_cast<int>(rows.size());
  if (rows.size() < 5) return fit;
  A.resize(static_cast<Eigen::Index>(rows.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 3; ++c) A(static_cast<Eigen::Index>(r), c) = rows[r][c];
    y[static_cast<Eigen::Index>(r)] = rows[r][3];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  fit.rate = std::abs(c[1]);
  return fit;
}

PropertyReport verify_wall_properties(const PotentialSpec& spec, const WallReport& report) {
  const RealField2& U = report.profile;
  const Grid& g = U.grid;
  const int N = g.N;
  const double a = spec.a_state()[0];
  const double b = spec.b_state()[1];
  PropertyReport p;

  p.nonnegative = true;
  p.bound_max = 0.0;
  for (int i = 0; i < N; ++i) {
    if (U.u1[i] < 0.0 || U.u2[i] < 0.0) p.nonnegative = false;
    p.bound_max = std::max(p.bound_max, U.u1[i] * U.u1[i] / (a * a) + U.u2[i] * U.u2[i] / (b * b));
  }
  p.bound_ok = p.bound_max <= 1.0 + 1e-10;

  p.monotone_u1 = true;
  p.monotone_u2 = true;
  for (int k = -1; k < N; ++k) {
    const double l1 = (k < 0) ? U.left_bc[0] : U.u1[k];
    const double r1 = (k + 1 >= N) ? U.right_bc[0] : U.u1[k + 1];
    const double l2 = (k < 0) ? U.left_bc[1] : U.u2[k];
    const double r2 = (k + 1 >= N) ? U.right_bc[1] : U.u2[k + 1];
    if (r1 < l1) p.monotone_u1 = false;
    if (r2 > l2) p.monotone_u2 = false;
  }

  p.symmetric_kind = spec.is_symmetric();
  p.symmetric_defect = std::numeric_limits<double>::quiet_NaN();
  if (p.symmetric_kind) {
    double m = 0.0;
    for (int i = 0; i < N; ++i) m = std::max(m, std::abs(U.u2[i] - U.u1[N - 1 - i]));
    p.symmetric_defect = m;
  }

  const PredictedRates pr = predicted_rates(spec);
  const double xc = report.center;
  std::vector<double> v(N);
  // Exclude nodes whose distance to the Dirichlet end is comparable to the
  // decay length: the truncation bends the tail there.
  auto windowed = [&](double rate, bool left) {
    const double margin = rate > 0.0 ? 4.0 / rate : 0.0;
    for (int i = 0; i < N; ++i) {
      const double x = g.x(i);
      if ((left && x < -g.L + margin) || (!left && x > g.L - margin)) v[i] = -1.0;
    }
  };
  for (int i = 0; i < N; ++i) v[i] = U.u1[i];
  windowed(pr.left_u1, true);
  p.decay_left = fit_decay(g, v, xc, true);
  p.decay_left.predicted = pr.left_u1;
  for (int i = 0; i < N; ++i) v[i] = a - U.u1[i];
  windowed(pr.right_u1, false);
  p.decay_right = fit_decay(g, v, xc, false);
  p.decay_right.predicted = pr.right_u1;
  for (int i = 0; i < N; ++i) v[i] = b - U.u2[i];
  windowed(pr.left_u2, true);
  p.decay_left_u2 = fit_decay(g, v, xc, true);
  p.decay_left_u2.predicted = pr.left_u2;
  for (int i = 0; i < N; ++i) v[i] = U.u2[i];
  windowed(pr.right_u2, false);
  p.decay_right_u2 = fit_decay(g, v, xc, false);
  p.decay_right_u2.predicted = pr.right_u2;
  p.decay_ok = p.decay_left.points >= 5 && p.decay_right.points >= 5 &&
               std::abs(p.decay_left.rel_error()) <= 0.02 &&
               std::abs(p.decay_right.rel_error()) <= 0.02;

  p.center_value = U.u1[g.center_index()];
  p.center_conjecture = (spec.kind() == PotentialKind::symmetric_cubic)
                       ? 1.0 / std::sqrt(1.0 + spec.gamma())
                       : std::numeric_limits<double>::quiet_NaN();
  return p;
}

WallReport newton_polish(const PotentialSpec& spec, const RealField2& U0, double tol, int max_iter) {
  RealField2 U = U0;
  U.validate();
  RealField2 R = el_residual(spec, U);
  double rsup = sup_norm(R);
  double r2 = residual_l2(R);
  int it = 0;
  for (; it < max_iter && rsup > tol; ++it) {
    const OperatorMatrix J = assemble_Lplus(spec, U);
    Eigen::VectorXd v = stack(derivative(U));
    const double vn = v.norm();
    if (!(vn > 0.0)) throw Error(ErrorCode::degenerate, "profile has no translation mode");
    v /= vn;
    const BorderedSolver solver(J, {v});
    const Eigen::VectorXd delta = solver.solve(-stack(R));

    double t = 1.0;
    bool accepted = false;
    RealField2 trial = U;
    while (t >= 1.0 / 1024.0) {
      for (int i = 0; i < U.grid.N; ++i) {
        trial.u1[i] = U.u1[i] + t * delta[i];
        trial.u2[i] = U.u2[i] + t * delta[U.grid.N + i];
      }
      const RealField2 Rt = el_residual(spec, trial);
      const double r2t = residual_l2(Rt);
      if (r2t <= (1.0 - 1e-4 * t) * r2) {
        U = trial;
        R = Rt;
        r2 = r2t;
        rsup = sup_norm(R);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // At the rounding floor no step can decrease the residual further.
      if (rsup <= 100.0 * tol) break;
      std::ostringstream msg;
      msg << "Newton line search failed at iteration " << it << " with residual " << rsup;
      throw Error(ErrorCode::not_converged, msg.str());
    }
  }
  if (rsup > tol && !(rsup <= 100.0 * tol && it < max_iter)) {
    std::ostringstream msg;
    msg << "Newton did not reach tolerance " << tol << " in " << max_iter
        << " iterations (last residual " << rsup << ")";
    throw Error(ErrorCode::not_converged, msg.str());
  }

  WallReport rep;
  rep.profile = U;
  rep.residual_sup = rsup;
  rep.newton_iterations = it;
  rep.energy = energy(spec, U);
  rep.center = crossing_position(U);
  rep.mass_center_shift = mass_center(spec, U);
  rep.center_u1 = U.u1[U.grid.center_index()];
  rep.center_u2 = U.u2[U.grid.center_index()];
  const PropertyReport p = verify_wall_properties(spec, rep);
  rep.decay_left = p.decay_left;
  rep.decay_right = p.decay_right;
  rep.decay_left_u2 = p.decay_left_u2;
  rep.decay_right_u2 = p.decay_right_u2;
  rep.monotone = {p.monotone_u1, p.monotone_u2};
  rep.symmetric_defect = p.symmetric_defect;
  return rep;
}

WallReport solve_wall(const PotentialSpec& spec, const Grid& grid, const SolveOptions& opts) {
  RealField2 U = initial_guess(spec, grid);
  std::string guess = "tanh";
  if (opts.guess_shift != 0.0) {
    U = translate(U, opts.guess_shift);
    std::ostringstream os;
    os << "tanh shifted by " << opts.guess_shift;
    guess = os.str();
  }
  int flow_steps = 0;
  if (opts.flow_steps > 0) {
    const FlowResult flow =
        gradient_flow(spec, U, opts.flow_dt_factor * grid.h * grid.h, opts.flow_steps);
    U = flow.field;
    flow_steps = flow.accepted;
  }
  WallReport rep = newton_polish(spec, U, opts.tol, opts.max_newton);
  int newton_total = rep.newton_iterations;
  if (opts.center && rep.center != 0.0) {
    const CenterResult c = normalize_center(spec, rep.profile);
    rep = newton_polish(spec, c.profile, opts.tol, opts.max_newton);
    newton_total += rep.newton_iterations;
  }
  rep.flow_steps = flow_steps;
  rep.newton_iterations = newton_total;
  rep.initial_guess = guess;
  return rep;
}

}  // namespace wallforge
