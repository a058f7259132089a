#include "wallforge/dynamics.hpp"

#include "internal.hpp"
#include "wallforge/error.hpp"
#include "wallforge/kernels.hpp"
#include "wallforge/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace wallforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Crank–Nicolson for iψₜ = −ψ″: (1 − i r D)ψⁿ⁺¹ = (1 + i r D)ψⁿ with
// r = dt/(2h²) and D the three-point stencil. The matrix has constant
// coefficients, so the forward-elimination factors are computed once.
class KineticStep {
 public:
  KineticStep(std::size_t n, double r) : n_(n), r_(r), cp_(n), inv_(n), rhs_(n) {
    const cplx diag(1.0, 2.0 * r);
    const cplx off(0.0, -r);
    off_ = off;
    cplx prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx den = diag - (i > 0 ? off * prev : cplx(0.0));
      inv_[i] = 1.0 / den;
      cp_[i] = off * inv_[i];
      prev = cp_[i];
    }
  }

  void apply(std::vector<cplx>& psi, cplx left, cplx right) {
    const auto& k = kernels::active();
    k.cn_rhs(psi.data(), n_, left, right, r_, rhs_.data());
    // Known boundary values of the implicit side move to the right-hand side.
    rhs_[0] += cplx(0.0, r_) * left;
    rhs_[n_ - 1] += cplx(0.0, r_) * right;
    cplx prev = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      prev = (rhs_[i] - (i > 0 ? off_ * prev : cplx(0.0))) * inv_[i];
      rhs_[i] = prev;
    }
    psi[n_ - 1] = rhs_[n_ - 1];
    for (std::size_t i = n_ - 1; i-- > 0;) psi[i] = rhs_[i] - cp_[i] * psi[i + 1];
  }

 private:
  std::size_t n_;
  double r_;
  cplx off_;
  std::vector<cplx> cp_, inv_, rhs_;
};

// Exact flow of iψⱼₜ = (εV + ∂ⱼF)ψⱼ over time tau (moduli are invariant).
class PotentialStep {
 public:
  PotentialStep(const PotentialSpec& spec, std::size_t n, const std::vector<double>& V, double eps)
      : coeffs_(detail::force_coeffs(spec)), n_(n), xi1_(n), xi2_(n), d1_(n), d2_(n), ev_(n, 0.0) {
    if (!V.empty()) {
      for (std::size_t i = 0; i < n; ++i) ev_[i] = eps * V[i];
      has_v_ = eps != 0.0;
    }
  }

  void apply(ComplexField2& psi, double tau) {
    const auto& k = kernels::active();
    k.modulus_sq(psi.psi1.data(), n_, xi1_.data());
    k.modulus_sq(psi.psi2.data(), n_, xi2_.data());
    k.force(xi1_.data(), xi2_.data(), n_, coeffs_, d1_.data(), d2_.data());
    if (has_v_) {
      for (std::size_t i = 0; i < n_; ++i) {
        d1_[i] += ev_[i];
        d2_[i] += ev_[i];
      }
    }
    k.phase_rotate(psi.psi1.data(), d1_.data(), n_, tau);
    k.phase_rotate(psi.psi2.data(), d2_.data(), n_, tau);
  }

 private:
  kernels::ForceCoeffs coeffs_;
  std::size_t n_;
  std::vector<double> xi1_, xi2_, d1_, d2_, ev_;
  bool has_v_ = false;
};

double total_energy(const PotentialSpec& spec, const ComplexField2& psi,
                    const std::vector<double>& V, double eps) {
  double e = energy(spec, psi);
  if (!V.empty() && eps != 0.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
      acc += V[i] * (std::norm(psi.psi1[i]) + std::norm(psi.psi2[i]) - spec.mu());
    }
    e += 0.5 * eps * psi.grid.h * acc;
  }
  return e;
}

bool all_finite(const ComplexField2& psi) {
  for (const auto& v : psi.psi1) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  for (const auto& v : psi.psi2) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

// Largest deviation of |ψⱼ| from the equilibrium modulus within five nodes of ±L.
double boundary_layer_defect(const ComplexField2& psi) {
  const int N = psi.grid.N;
  const int m = std::min(5, N);
  double d = 0.0;
  for (int i = 0; i < m; ++i) {
    d = std::max({d, std::abs(std::abs(psi.psi1[i]) - std::abs(psi.left_bc[0])),
                  std::abs(std::abs(psi.psi2[i]) - std::abs(psi.left_bc[1])),
                  std::abs(std::abs(psi.psi1[N - 1 - i]) - std::abs(psi.right_bc[0])),
                  std::abs(std::abs(psi.psi2[N - 1 - i]) - std::abs(psi.right_bc[1]))});
  }
  return d;
}

// Density √g₁₁|ψ₁|² + √g₂₂|ψ₂|² − μ at the nodes.
std::vector<double> mass_density(const PotentialSpec& spec, const ComplexField2& psi) {
  const Vec2 w = spec.mass_weights();
  std::vector<double> n(psi.psi1.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = w[0] * std::norm(psi.psi1[i]) + w[1] * std::norm(psi.psi2[i]) - spec.mu();
  }
  return n;
}

void check_radius(const Grid& g, double R) {
  if (!(R > 0.0) || R > 0.5 * g.L + 1e-12) {
    throw Error(ErrorCode::usage, "cutoff radius must satisfy 0 < R <= L/2");
  }
}

double default_radius(const Grid& g) { return g.L / 3.0; }

double wrap_phase(double t) { return std::remainder(t, 2.0 * std::numbers::pi); }

}  // namespace

double cutoff(double x, double R) {
  const double s = (std::abs(x) - R) / R;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double cutoff_derivative(double x, double R) {
  const double s = (std::abs(x) - R) / R;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double d = -30.0 * s * s * (1.0 - s) * (1.0 - s) / R;
  return x < 0.0 ? -d : d;
}

ComplexField2 to_lab_frame(const PotentialSpec& spec, const ComplexField2& psi, double t) {
  const FDerivatives f0 = spec.f_derivatives({0.0, 0.0});
  // In the co-rotating frame the rates are ∂ⱼF; the laboratory system drops
  // the constant ∂ⱼF(0, 0), i.e. ψ_lab = e^{i∂ⱼF(0,0)t}ψ.
  return psi.gauge(f0.d1[0] * t, f0.d1[1] * t);
}

EvolutionTrace evolve(const PotentialSpec& spec, const ComplexField2& psi0, double T, double dt,
                      const std::vector<double>& V, double eps, const EvolveOptions& opts) {
  psi0.validate();
  if (!(dt > 0.0) || !(T > 0.0)) throw Error(ErrorCode::usage, "evolve needs T > 0 and dt > 0");
  const Grid& g = psi0.grid;
  const auto n = static_cast<std::size_t>(g.N);
  if (!V.empty() && V.size() != n) throw Error(ErrorCode::usage, "potential must have one value per node");
  if (opts.wall && !opts.wall->grid.same_as(g)) {
    throw Error(ErrorCode::usage, "reference wall and state live on different grids");
  }

  const int steps = std::max(1, static_cast<int>(std::llround(T / dt)));
  const double out_dt = opts.output_interval > 0.0 ? opts.output_interval : std::max(dt, T / 2000.0);
  const int stride = std::max(1, static_cast<int>(std::llround(out_dt / dt)));
  const double R = opts.R > 0.0 ? opts.R : default_radius(g);
  check_radius(g, R);

  EvolutionTrace tr;
  double m_ref = kNaN;
  double g_ref = 0.0;
  ComplexField2 ref_complex;
  if (opts.wall) {
    m_ref = wall_mass(spec, *opts.wall);
    ref_complex = ComplexField2::from_real(*opts.wall);
    g_ref = mass_center_G(spec, ref_complex, 0.0, R, m_ref);
  }

  ComplexField2 psi = psi0;
  const std::vector<double> mod1_0 = [&] {
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = std::abs(psi0.psi1[i]);
    return m;
  }();
  const std::vector<double> mod2_0 = [&] {
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = std::abs(psi0.psi2[i]);
    return m;
  }();

  KineticStep kin(n, dt / (2.0 * g.h * g.h));
  PotentialStep pot(spec, n, V, eps);
  const double e0 = total_energy(spec, psi, V, eps);
  double alpha_prev = kNaN;
  bool warned = false;

  auto record = [&](double t) {
    tr.times.push_back(t);
    const double e = total_energy(spec, psi, V, eps);
    tr.energy.push_back(e);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
    double md = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      md = std::max({md, std::abs(std::abs(psi.psi1[i]) - mod1_0[i]),
                     std::abs(std::abs(psi.psi2[i]) - mod2_0[i])});
    }
    tr.max_modulus_defect = std::max(tr.max_modulus_defect, md);
    if (!warned && boundary_layer_defect(psi) > 1e-3) {
      std::ostringstream msg;
      msg << "boundary-layer reflection: |psi| deviates from the equilibrium by more than 1e-3 "
             "within 5 nodes of the domain ends at t = "
          << t;
      tr.warnings.push_back(msg.str());
      warned = true;
    }
    if (opts.wall) {
      const double G = mass_center_G(spec, psi, 0.0, R, m_ref);
      tr.mass_center_G.push_back(G);
      const bool first = std::isnan(alpha_prev);
      const double seed = first ? g_ref - G : alpha_prev;
      const double search = first ? opts.alpha_search : std::min(opts.alpha_search, 0.25);
      ModulationFit fit = modulation_fit(psi, *opts.wall, seed, search, opts.rho_radius, opts.orbit_cap);
      alpha_prev = fit.alpha;
      tr.alpha.push_back(fit.alpha);
      tr.theta1.push_back(fit.theta1);
      tr.theta2.push_back(fit.theta2);
      tr.rho.push_back(fit.rho);
    } else {
      tr.mass_center_G.push_back(kNaN);
      tr.alpha.push_back(kNaN);
      tr.theta1.push_back(kNaN);
      tr.theta2.push_back(kNaN);
      tr.rho.push_back(kNaN);
    }
    if (opts.keep_states) tr.states.push_back(psi);
  };

  record(0.0);
  for (int s = 1; s <= steps; ++s) {
    pot.apply(psi, 0.5 * dt);
    kin.apply(psi.psi1, psi.left_bc[0], psi.right_bc[0]);
    kin.apply(psi.psi2, psi.left_bc[1], psi.right_bc[1]);
    pot.apply(psi, 0.5 * dt);
    if (s % stride == 0 || s == steps) {
      if (!all_finite(psi)) {
        std::ostringstream msg;
        msg << "non-finite state at t = " << s * dt;
        throw Error(ErrorCode::non_finite, msg.str());
      }
      record(s * dt);
    }
  }
  tr.steps = steps;
  tr.final_state = psi;
  return tr;
}

double mass_center_G(const PotentialSpec& spec, const ComplexField2& psi, double a_shift, double R,
                     double wall_mass) {
  const Grid& g = psi.grid;
  check_radius(g, R);
  if (!(std::abs(wall_mass) > 0.0)) throw Error(ErrorCode::degenerate, "wall mass is zero");
  const std::vector<double> n = mass_density(spec, psi);
  const Vec2 w = spec.mass_weights();
  const double nl = w[0] * std::norm(psi.left_bc[0]) + w[1] * std::norm(psi.left_bc[1]) - spec.mu();
  const double nr = w[0] * std::norm(psi.right_bc[0]) + w[1] * std::norm(psi.right_bc[1]) - spec.mu();
  std::vector<double> f(n.size());
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    const double dens = a_shift == 0.0 ? n[i] : interpolate(g, n, nl, nr, x - a_shift);
    f[i] = cutoff(x, R) * x * dens;
  }
  return g.integrate(f) / wall_mass;
}

namespace {

// ρ_A between ψ and (e^{iθ₁}u₁, e^{iθ₂}u₂) for a fixed real profile u. The
// gradient term is quadratic in e^{iθ} and the modulus term independent of
// θ, so only the sup term needs a pass over the nodes per phase.
class GaugedDistance {
 public:
  GaugedDistance(const ComplexField2& psi, const RealField2& u, double A) : h_(psi.grid.h) {
    const Grid& g = psi.grid;
    const int N = g.N;
    if (!(A > 0.0) || A > g.L) throw Error(ErrorCode::usage, "rho_A needs 0 < A <= L");
    for (int j = 0; j < 2; ++j) {
      const auto& p = j == 0 ? psi.psi1 : psi.psi2;
      const auto& v = j == 0 ? u.u1 : u.u2;
      auto pv = [&](int i) -> cplx {
        if (i < 0) return psi.left_bc[j];
        if (i >= N) return psi.right_bc[j];
        return p[i];
      };
      auto uv = [&](int i) -> double {
        if (i < 0) return u.left_bc[j];
        if (i >= N) return u.right_bc[j];
        return v[i];
      };
      Comp& c = comp_[j];
      for (int i = -1; i < N; ++i) {
        const cplx dp = pv(i + 1) - pv(i);
        const double du = uv(i + 1) - uv(i);
        c.pp += std::norm(dp);
        c.uu += du * du;
        c.pu += dp * du;
      }
      for (int i = 0; i < N; ++i) {
        const double dm = std::abs(p[i]) - std::abs(v[i]);
        c.mod += dm * dm;
        c.ip += v[i] * p[i];
        if (std::abs(g.x(i)) <= A + 1e-12 * g.L) {
          c.wp.push_back(p[i]);
          c.wu.push_back(v[i]);
        }
      }
      const double dl = std::abs(psi.left_bc[j]) - std::abs(u.left_bc[j]);
      const double dr = std::abs(psi.right_bc[j]) - std::abs(u.right_bc[j]);
      c.mod += 0.5 * (dl * dl + dr * dr);
    }
  }

  double inner_phase(int j) const { return std::arg(comp_[j].ip); }

  double component(int j, double theta) const {
    const Comp& c = comp_[j];
    const cplx e = std::polar(1.0, theta);
    const double grad = std::max(0.0, c.pp + c.uu - 2.0 * std::real(std::conj(e) * c.pu));
    double sup = 0.0;
    for (std::size_t i = 0; i < c.wp.size(); ++i) sup = std::max(sup, std::abs(c.wp[i] - e * c.wu[i]));
    return std::sqrt(grad / h_) + std::sqrt(c.mod * h_) + sup;
  }

  double total(double t1, double t2) const { return component(0, t1) + component(1, t2); }

 private:
  struct Comp {
    double pp = 0.0, uu = 0.0, mod = 0.0;
    cplx pu = 0.0, ip = 0.0;
    std::vector<cplx> wp;
    std::vector<double> wu;
  };
  double h_;
  Comp comp_[2];
};

template <class F>
double golden_min(F&& f, double lo, double hi, double tol, int& evals) {
  constexpr double r = 0.6180339887498949;
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = f(c), fd = f(d);
  evals += 2;
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
    ++evals;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ModulationFit modulation_fit(const ComplexField2& psi, const RealField2& wall, double alpha_seed,
                             double search, double rho_radius, double cap) {
  if (!psi.grid.same_as(wall.grid)) throw Error(ErrorCode::usage, "modulation_fit: grid mismatch");
  if (!(search > 0.0)) throw Error(ErrorCode::usage, "modulation_fit: search width must be positive");
  ModulationFit best;

  // The α objective uses the phases of ⟨uⱼ(·+α), ψⱼ⟩.
  auto objective = [&](double alpha) {
    const GaugedDistance d(psi, translate(wall, -alpha), rho_radius);
    return d.total(d.inner_phase(0), d.inner_phase(1));
  };

  // Coarse scan of the α window, then golden-section refinement around the best sample.
  constexpr int kScan = 16;
  double a_best = alpha_seed;
  double f_best = std::numeric_limits<double>::infinity();
  const double step = 2.0 * search / kScan;
  for (int k = 0; k <= kScan; ++k) {
    const double a = alpha_seed - search + k * step;
    const double f = objective(a);
    ++best.evaluations;
    if (f < f_best) {
      f_best = f;
      a_best = a;
    }
  }
  const double alpha = golden_min(objective, a_best - step, a_best + step, 1e-10 * std::max(1.0, psi.grid.L),
                                  best.evaluations);

  // Phases: the components decouple, and the inner-product phase is kept
  // whenever the sup term makes the refined phase no better.
  const GaugedDistance d(psi, translate(wall, -alpha), rho_radius);
  double th[2];
  double rho = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double t0 = d.inner_phase(j);
    const double t = golden_min([&](double t) { return d.component(j, t); }, t0 - 0.05, t0 + 0.05, 1e-12,
                                best.evaluations);
    const double f0 = d.component(j, t0);
    const double f = d.component(j, t);
    th[j] = f < f0 ? t : t0;
    rho += std::min(f, f0);
  }

  best.alpha = alpha;
  best.theta1 = wrap_phase(th[0]);
  best.theta2 = wrap_phase(th[1]);
  best.rho = rho;
  if (!(best.rho <= cap)) {
    std::ostringstream msg;
    msg << "state left the orbital neighbourhood: rho_A = " << best.rho << " > cap " << cap;
    throw Error(ErrorCode::left_orbit, msg.str());
  }
  return best;
}

double localized_numerator(const PotentialSpec& spec, const ComplexField2& psi, double R) {
  const Grid& g = psi.grid;
  check_radius(g, R);
  const std::vector<double> n = mass_density(spec, psi);
  double acc = 0.0;
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    acc += cutoff(x, R) * x * n[i];
  }
  return g.h * acc;
}

double localized_momentum(const PotentialSpec& spec, const ComplexField2& psi, double R) {
  const Grid& g = psi.grid;
  check_radius(g, R);
  const Vec2 w = spec.mass_weights();
  const int N = g.N;
  auto phi = [&](int i) {
    if (i < 0 || i >= N) return 0.0;
    const double x = g.x(i);
    return x * cutoff(x, R);
  };
  auto val = [&](const std::vector<cplx>& f, int j, int i) {
    if (i < 0) return psi.left_bc[j];
    if (i >= N) return psi.right_bc[j];
    return f[i];
  };
  // Edge fluxes 2Im(ψ̄ᵢψᵢ₊₁)/h are the exact discrete currents of the
  // three-point Laplacian, so the identity holds for the semi-discrete flow.
  double acc = 0.0;
  for (int i = -1; i < N; ++i) {
    const double dphi = phi(i + 1) - phi(i);
    if (dphi == 0.0) continue;
    const double q1 = std::imag(std::conj(val(psi.psi1, 0, i)) * val(psi.psi1, 0, i + 1));
    const double q2 = std::imag(std::conj(val(psi.psi2, 1, i)) * val(psi.psi2, 1, i + 1));
    acc += 2.0 * (w[0] * q1 + w[1] * q2) * dphi / g.h;
  }
  return acc;
}

MomentumReport momentum_drift(const PotentialSpec& spec, const std::vector<double>& times,
                              const std::vector<ComplexField2>& states, double R) {
  if (times.size() != states.size()) throw Error(ErrorCode::usage, "momentum_drift: size mismatch");
  if (times.size() < 3) throw Error(ErrorCode::usage, "momentum_drift needs at least three states");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error(ErrorCode::usage, "momentum_drift: times must increase");
  }
  MomentumReport rep;
  rep.times = times;
  for (const auto& s : states) {
    rep.numerator.push_back(localized_numerator(spec, s, R));
    rep.momentum.push_back(localized_momentum(spec, s, R));
  }
  const std::size_t m = times.size();
  rep.numerator_rate.assign(m, kNaN);
  rep.momentum_integral.assign(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    rep.momentum_integral[k] = rep.momentum_integral[k - 1] +
                               0.5 * (times[k] - times[k - 1]) * (rep.momentum[k] + rep.momentum[k - 1]);
  }
  double scale = 0.0;
  for (double p : rep.momentum) {
    rep.max_abs_momentum = std::max(rep.max_abs_momentum, std::abs(p));
  }
  double defect = 0.0;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    // Centred difference on a possibly non-uniform time grid.
    const double t0 = times[k - 1], t1 = times[k], t2 = times[k + 1];
    const double a = -(t2 - t1) / ((t1 - t0) * (t2 - t0));
    const double b = ((t2 - t1) - (t1 - t0)) / ((t1 - t0) * (t2 - t1));
    const double c = (t1 - t0) / ((t2 - t1) * (t2 - t0));
    rep.numerator_rate[k] = a * rep.numerator[k - 1] + b * rep.numerator[k] + c * rep.numerator[k + 1];
    defect = std::max(defect, std::abs(rep.numerator_rate[k] - rep.momentum[k]));
    scale = std::max(scale, std::abs(rep.numerator_rate[k]));
  }
  scale = std::max({scale, rep.max_abs_momentum, 1e-300});
  rep.max_identity_defect = defect / scale;
  return rep;
}

ComplexField2 perturbed_wall(const RealField2& wall, double eps, std::uint64_t seed,
                             double rho_radius) {
  const ComplexField2 base = ComplexField2::from_real(wall);
  if (eps == 0.0) return base;
  if (!(eps > 0.0)) throw Error(ErrorCode::usage, "perturbation size must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const cplx c1(amp(rng), amp(rng));
  const cplx c2(amp(rng), amp(rng));
  auto build = [&](double s) {
    ComplexField2 psi = base;
    for (int i = 0; i < wall.grid.N; ++i) {
      const double x = wall.grid.x(i);
      const double bump = std::exp(-x * x);
      psi.psi1[i] += s * c1 * bump;
      psi.psi2[i] += s * c2 * bump;
    }
    return psi;
  };
  // ρ_A is positively homogeneous to leading order in the amplitude, so a
  // few rescalings land on the requested size.
  double s = eps;
  for (int it = 0; it < 30; ++it) {
    const double r = rho_A(build(s), base, rho_radius);
    if (!(r > 0.0)) throw Error(ErrorCode::degenerate, "perturbation has zero rho_A size");
    if (std::abs(r - eps) <= 1e-12 * eps) break;
    s *= eps / r;
  }
  return build(s);
}

OrbitalResult orbital_stability_experiment(const PotentialSpec& spec, const RealField2& wall,
                                           double eps, double T, const OrbitalOptions& opts) {
  OrbitalResult res;
  res.eps = eps;
  const ComplexField2 psi0 = perturbed_wall(wall, eps, opts.seed, opts.rho_radius);
  res.initial_rho = rho_A(psi0, ComplexField2::from_real(wall), opts.rho_radius);
  EvolveOptions eo;
  eo.wall = wall;
  eo.output_interval = opts.output_interval;
  eo.rho_radius = opts.rho_radius;
  res.trace = evolve(spec, psi0, T, opts.dt, {}, 0.0, eo);
  const auto& tr = res.trace;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    res.sup_rho = std::max(res.sup_rho, tr.rho[k]);
    if (eps > 0.0) {
      res.fitted_C = std::max(res.fitted_C, std::abs(tr.alpha[k]) / (eps * std::max(1.0, tr.times[k])));
    }
  }
  const double floor = 1e-6;  // the unperturbed evolution stays at rounding level
  res.rho_ok = res.sup_rho <= std::max(opts.K * eps, floor);
  res.alpha_ok = eps > 0.0 ? res.fitted_C <= opts.C_max : true;
  res.pass = res.rho_ok && res.alpha_ok;
  return res;
}

}  // namespace wallforge
