#include "wallforge/potential.hpp"

#include "wallforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace wallforge {

namespace {

void require_finite(const Vec2& p, const char* what) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
    std::ostringstream msg;
    msg << what << ": non-finite argument (" << p[0] << ", " << p[1] << ")";
    throw Error(ErrorCode::domain, msg.str());
  }
}

void require_param(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::domain, std::string("potential parameter ") + name + " is not finite");
  }
}

double min_eig(const Mat2& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double d = 0.5 * (m[0][0] - m[1][1]);
  return tr - std::sqrt(d * d + m[0][1] * m[1][0]);
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::symmetric_cubic: return "symmetric-cubic";
    case PotentialKind::general_cubic: return "general-cubic";
    case PotentialKind::quartic: return "quartic";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "symmetric-cubic") return PotentialKind::symmetric_cubic;
  if (name == "general-cubic") return PotentialKind::general_cubic;
  if (name == "quartic") return PotentialKind::quartic;
  throw Error(ErrorCode::invalid_config,
              "unknown potential kind '" + name +
                  "' (expected symmetric-cubic, general-cubic or quartic)");
}

PotentialSpec PotentialSpec::symmetric_cubic(double gamma) {
  require_param(gamma, "gamma");
  if (!(gamma > 1.0)) {
    std::ostringstream msg;
    msg << "symmetric-cubic requires gamma > 1 (got " << gamma << ")";
    throw Error(ErrorCode::domain, msg.str());
  }
  PotentialSpec s;
  s.kind_ = PotentialKind::symmetric_cubic;
  s.gamma_ = gamma;
  s.g11_ = 1.0;
  s.g22_ = 1.0;
  s.g12_ = gamma;
  s.mu_ = 1.0;
  s.finalize();
  return s;
}

PotentialSpec PotentialSpec::general_cubic(double g11, double g22, double g12, double mu) {
  require_param(g11, "g11");
  require_param(g22, "g22");
  require_param(g12, "g12");
  require_param(mu, "mu");
  if (!(g11 > 0.0) || !(g22 > 0.0)) {
    throw Error(ErrorCode::domain, "general-cubic requires g11 > 0 and g22 > 0");
  }
  const double geo = std::sqrt(g11 * g22);
  if (!(g12 > geo)) {
    std::ostringstream msg;
    msg << "general-cubic requires g12 > sqrt(g11*g22) = " << geo << " (got " << g12 << ")";
    throw Error(ErrorCode::domain, msg.str());
  }
  if (!(mu > 0.0)) {
    throw Error(ErrorCode::domain, "general-cubic requires mu > 0");
  }
  PotentialSpec s;
  s.kind_ = PotentialKind::general_cubic;
  s.g11_ = g11;
  s.g22_ = g22;
  s.g12_ = g12;
  s.mu_ = mu;
  s.gamma_ = g12 / geo;
  s.finalize();
  return s;
}

PotentialSpec PotentialSpec::quartic(double gamma) {
  require_param(gamma, "gamma");
  if (!(gamma > 1.0)) {
    std::ostringstream msg;
    msg << "quartic requires gamma > 1 (got " << gamma << ")";
    throw Error(ErrorCode::domain, msg.str());
  }
  PotentialSpec s;
  s.kind_ = PotentialKind::quartic;
  s.gamma_ = gamma;
  s.finalize();
  return s;
}

void PotentialSpec::finalize() {
  switch (kind_) {
    case PotentialKind::symmetric_cubic:
    case PotentialKind::general_cubic: {
      // ½(√g₁₁ξ₁ + √g₂₂ξ₂ − μ)² + (g₁₂ − √(g₁₁g₂₂))ξ₁ξ₂ expands to the
      // familiar ½g₁₁ξ₁² + ½g₂₂ξ₂² + g₁₂ξ₁ξ₂ − μ(√g₁₁ξ₁ + √g₂₂ξ₂) + ½μ².
      const double s11 = std::sqrt(g11_);
      const double s22 = std::sqrt(g22_);
      coeffs_ = PolyCoeffs{1, 0.5, s11, s22, mu_, g12_ - s11 * s22};
      a_ = std::sqrt(mu_ / s11);
      b_ = std::sqrt(mu_ / s22);
      break;
    }
    case PotentialKind::quartic:
      coeffs_ = PolyCoeffs{2, 0.25, 1.0, 1.0, 1.0, 0.5 * (gamma_ - 1.0)};
      a_ = 1.0;
      b_ = 1.0;
      break;
  }
}

std::optional<Vec2> PotentialSpec::c_state() const {
  if (kind_ != PotentialKind::symmetric_cubic) return std::nullopt;
  const double c = 1.0 / std::sqrt(1.0 + gamma_);
  return Vec2{c, c};
}

bool PotentialSpec::is_symmetric() const noexcept {
  return kind_ != PotentialKind::general_cubic || (g11_ == g22_);
}

bool PotentialSpec::is_exact_gamma3() const noexcept {
  return kind_ == PotentialKind::symmetric_cubic && gamma_ == 3.0;
}

Vec2 PotentialSpec::mass_weights() const noexcept {
  return {coeffs_.c1, coeffs_.c2};
}

FDerivatives PotentialSpec::f_derivatives(const Vec2& xi) const {
  const PolyCoeffs& k = coeffs_;
  FDerivatives out;
  if (k.degree == 1) {
    const double s = k.c1 * xi[0] + k.c2 * xi[1] - k.mu;
    out.f = k.alpha * s * s + k.beta * xi[0] * xi[1];
    out.d1 = {2.0 * k.alpha * k.c1 * s + k.beta * xi[1],
              2.0 * k.alpha * k.c2 * s + k.beta * xi[0]};
    const double f12 = 2.0 * k.alpha * k.c1 * k.c2 + k.beta;
    out.d2 = {{{2.0 * k.alpha * k.c1 * k.c1, f12}, {f12, 2.0 * k.alpha * k.c2 * k.c2}}};
    return out;
  }
  const double t1 = xi[0] * xi[0];
  const double t2 = xi[1] * xi[1];
  const double s = k.c1 * t1 + k.c2 * t2 - k.mu;
  out.f = k.alpha * s * s + k.beta * t1 * t2;
  out.d1 = {4.0 * k.alpha * k.c1 * s * xi[0] + 2.0 * k.beta * xi[0] * t2,
            4.0 * k.alpha * k.c2 * s * xi[1] + 2.0 * k.beta * xi[1] * t1};
  const double m = 8.0 * k.alpha * k.c1 * k.c2 + 4.0 * k.beta;
  const double f11 = 8.0 * k.alpha * k.c1 * k.c1 * t1 + 4.0 * k.alpha * k.c1 * s + 2.0 * k.beta * t2;
  const double f22 = 8.0 * k.alpha * k.c2 * k.c2 * t2 + 4.0 * k.alpha * k.c2 * s + 2.0 * k.beta * t1;
  const double f12 = m * xi[0] * xi[1];
  out.d2 = {{{f11, f12}, {f12, f22}}};
  const double f111 = 24.0 * k.alpha * k.c1 * k.c1 * xi[0];
  const double f112 = m * xi[1];
  const double f122 = m * xi[0];
  const double f222 = 24.0 * k.alpha * k.c2 * k.c2 * xi[1];
  out.d3[0] = {{{f111, f112}, {f112, f122}}};
  out.d3[1] = {{{f112, f122}, {f122, f222}}};
  return out;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
    case PotentialKind::symmetric_cubic:
    case PotentialKind::quartic: os << "(gamma=" << gamma_ << ")"; break;
    case PotentialKind::general_cubic:
      os << "(g11=" << g11_ << ", g22=" << g22_ << ", g12=" << g12_ << ", mu=" << mu_ << ")";
      break;
  }
  return os.str();
}

double eval_W(const PotentialSpec& spec, const Vec2& p) {
  require_finite(p, "eval_W");
  return spec.f_derivatives({p[0] * p[0], p[1] * p[1]}).f;
}

Vec2 grad_W(const PotentialSpec& spec, const Vec2& p) {
  require_finite(p, "grad_W");
  const auto d = spec.f_derivatives({p[0] * p[0], p[1] * p[1]});
  return {2.0 * p[0] * d.d1[0], 2.0 * p[1] * d.d1[1]};
}

Mat2 hess_W(const PotentialSpec& spec, const Vec2& p) {
  require_finite(p, "hess_W");
  const auto d = spec.f_derivatives({p[0] * p[0], p[1] * p[1]});
  const double w12 = 4.0 * p[0] * p[1] * d.d2[0][1];
  return {{{2.0 * d.d1[0] + 4.0 * p[0] * p[0] * d.d2[0][0], w12},
           {w12, 2.0 * d.d1[1] + 4.0 * p[1] * p[1] * d.d2[1][1]}}};
}

Tensor3 third_W(const PotentialSpec& spec, const Vec2& p) {
  require_finite(p, "third_W");
  const auto d = spec.f_derivatives({p[0] * p[0], p[1] * p[1]});
  const double u1 = p[0];
  const double u2 = p[1];
  const double w111 = 12.0 * u1 * d.d2[0][0] + 8.0 * u1 * u1 * u1 * d.d3[0][0][0];
  const double w112 = 4.0 * u2 * d.d2[0][1] + 8.0 * u1 * u1 * u2 * d.d3[0][0][1];
  const double w122 = 4.0 * u1 * d.d2[0][1] + 8.0 * u1 * u2 * u2 * d.d3[0][1][1];
  const double w222 = 12.0 * u2 * d.d2[1][1] + 8.0 * u2 * u2 * u2 * d.d3[1][1][1];
  Tensor3 t{};
  t[0] = {{{w111, w112}, {w112, w122}}};
  t[1] = {{{w112, w122}, {w122, w222}}};
  return t;
}

Vec2 dF_at(const PotentialSpec& spec, const Vec2& u) {
  require_finite(u, "dF_at");
  return spec.f_derivatives({u[0] * u[0], u[1] * u[1]}).d1;
}

Vec2 exact_wall(const PotentialSpec& spec, double x) {
  if (!spec.is_exact_gamma3()) {
    throw Error(ErrorCode::unsupported,
                "exact_wall is only defined for symmetric-cubic gamma=3, not " + spec.describe());
  }
  if (!std::isfinite(x)) throw Error(ErrorCode::domain, "exact_wall: non-finite x");
  const double t = std::tanh(x / std::sqrt(2.0));
  return {0.5 * (1.0 + t), 0.5 * (1.0 - t)};
}

bool AxiomReport::passed(const std::string& axiom) const {
  return std::none_of(failures.begin(), failures.end(),
                      [&](const AxiomFailure& f) { return f.axiom == axiom; });
}

void AxiomReport::throw_if_failed() const {
  if (failures.empty()) return;
  const auto& f = failures.front();
  std::ostringstream msg;
  msg << f.axiom << " fails at (" << f.witness[0] << ", " << f.witness[1] << "): " << f.detail
      << " [value " << f.value << "]";
  throw Error(ErrorCode::axiom_violation, msg.str());
}

AxiomReport check_W_axioms(const PotentialSpec& spec, const SampleBox& box,
                           std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::usage, "check_W_axioms needs n_samples >= 1");
  if (!(box.x_min >= 0.0) || !(box.y_min >= 0.0) || !(box.x_max > box.x_min) ||
      !(box.y_max > box.y_min)) {
    throw Error(ErrorCode::usage, "sample box must be a non-empty rectangle in the closed quadrant");
  }

  AxiomReport rep;
  rep.n_samples = n_samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.x_min, box.x_max);
  std::uniform_real_distribution<double> uy(box.y_min, box.y_max);

  std::vector<Vec2> pts;
  pts.reserve(n_samples + 4);
  pts.push_back(spec.a_state());
  pts.push_back(spec.b_state());
  for (std::size_t i = 0; i < n_samples; ++i) pts.push_back({ux(rng), uy(rng)});

  // (W1) nonnegativity.
  rep.min_W = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const double w = eval_W(spec, p);
    if (w < rep.min_W) {
      rep.min_W = w;
      rep.min_W_at = p;
    }
  }
  if (rep.min_W < -1e-12) {
    rep.failures.push_back({"W1", rep.min_W_at, rep.min_W, "W is negative"});
  }

  // (W2) zeros at the two equilibria, which are critical points.
  for (const auto& e : {spec.a_state(), spec.b_state()}) {
    const double w = eval_W(spec, e);
    const Vec2 g = grad_W(spec, e);
    const double gn = std::hypot(g[0], g[1]);
    if (std::abs(w) > 1e-12 || gn > 1e-12) {
      rep.failures.push_back({"W2", e, std::max(std::abs(w), gn), "equilibrium is not a zero of W"});
    }
  }
  // A sampled zero away from both equilibria would contradict "only if".
  const double scale = std::max(spec.a_state()[0], spec.b_state()[1]);
  for (const auto& p : pts) {
    const double da = std::hypot(p[0] - spec.a_state()[0], p[1]);
    const double db = std::hypot(p[0], p[1] - spec.b_state()[1]);
    if (std::min(da, db) > 1e-3 * scale && eval_W(spec, p) <= 1e-14) {
      rep.failures.push_back({"W2", p, eval_W(spec, p), "W vanishes away from the equilibria"});
      break;
    }
  }

  // (W3) nondegenerate minima.
  rep.hess_min_eig = {min_eig(hess_W(spec, spec.a_state())), min_eig(hess_W(spec, spec.b_state()))};
  if (!(rep.hess_min_eig[0] > 1e-12)) {
    rep.failures.push_back({"W3", spec.a_state(), rep.hess_min_eig[0],
                            "Hessian at the right equilibrium is not positive definite"});
  }
  if (!(rep.hess_min_eig[1] > 1e-12)) {
    rep.failures.push_back({"W3", spec.b_state(), rep.hess_min_eig[1],
                            "Hessian at the left equilibrium is not positive definite"});
  }

  // (W4) coercivity ∇W(U)·U ≥ c₀|U|² for |U| ≥ R₀. Sample radially out to
  // four times the equilibrium scale and report the smallest R₀ on a ladder
  // for which the sampled ratio is positive.
  std::vector<Vec2> far = pts;
  std::uniform_real_distribution<double> ur(0.0, 4.0 * scale);
  std::uniform_real_distribution<double> uth(0.0, 0.5 * std::acos(-1.0));
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double r = ur(rng);
    const double th = uth(rng);
    far.push_back({r * std::cos(th), r * std::sin(th)});
  }
  auto ratio = [&](const Vec2& p) {
    const Vec2 g = grad_W(spec, p);
    return (g[0] * p[0] + g[1] * p[1]) / (p[0] * p[0] + p[1] * p[1]);
  };
  bool found = false;
  Vec2 worst{};
  double worst_ratio = 0.0;
  for (int step = 1; step <= 12 && !found; ++step) {
    const double R0 = scale * (1.0 + 0.25 * step);
    double cmin = std::numeric_limits<double>::infinity();
    Vec2 at{};
    for (const auto& p : far) {
      if (std::hypot(p[0], p[1]) < R0) continue;
      const double q = ratio(p);
      if (q < cmin) {
        cmin = q;
        at = p;
      }
    }
    if (std::isinf(cmin)) break;  // no samples that far out
    if (cmin > 0.0) {
      rep.R0 = R0;
      rep.c0 = cmin;
      found = true;
    } else {
      worst = at;
      worst_ratio = cmin;
    }
  }
  if (!found) {
    rep.failures.push_back({"W4", worst, worst_ratio, "no coercivity radius found on the sample set"});
  }

  // (W5) ∂₁∂₂F ≥ 0, not identically zero.
  const PolyCoeffs& k = spec.coeffs();
  const double mixed = (k.degree == 1) ? 2.0 * k.alpha * k.c1 * k.c2 + k.beta
                                       : 8.0 * k.alpha * k.c1 * k.c2 + 4.0 * k.beta;
  rep.w5_closed_form_nonneg = mixed > 0.0;
  rep.w5_min = std::numeric_limits<double>::infinity();
  rep.w5_max = -std::numeric_limits<double>::infinity();
  Vec2 w5_at{};
  for (const auto& p : pts) {
    const double v = spec.f_derivatives({p[0] * p[0], p[1] * p[1]}).d2[0][1];
    if (v < rep.w5_min) {
      rep.w5_min = v;
      w5_at = p;
    }
    rep.w5_max = std::max(rep.w5_max, v);
  }
  if (rep.w5_min < 0.0 || !(rep.w5_max > 0.0) || !rep.w5_closed_form_nonneg) {
    rep.failures.push_back({"W5", w5_at, rep.w5_min, "mixed derivative of F is not nonnegative"});
  }
  return rep;
}

}  // namespace wallforge
