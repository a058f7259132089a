#include "wallforge/discretization.hpp"

#include "internal.hpp"
#include "wallforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wallforge {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b)) {
    std::ostringstream msg;
    msg << what << ": grids differ (L=" << a.L << ", N=" << a.N << " vs L=" << b.L
        << ", N=" << b.N << ")";
    throw Error(ErrorCode::usage, msg.str());
  }
}

double min_eig(const Mat2& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double d = 0.5 * (m[0][0] - m[1][1]);
  return tr - std::sqrt(d * d + m[0][1] * m[1][0]);
}

// Four-point Lagrange interpolation on an array extended by its ghosts.
// `get(k)` returns the value at node k, k = −1 … N (ghosts at the ends),
// clamped beyond.
template <class T, class Get>
T cubic_at(const Grid& g, double x, Get get) {
  const double s = (x + g.L) / g.h - 1.0;  // fractional node index
  int k = static_cast<int>(std::floor(s));
  k = std::clamp(k, -2, g.N);
  const double t = s - k;
  const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return w0 * get(k - 1) + w1 * get(k) + w2 * get(k + 1) + w3 * get(k + 2);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::vector<double>> read_rows(std::istream& is, const std::string& header,
                                           std::size_t cols) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::io, "empty field file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw Error(ErrorCode::io, "field file header is '" + line + "', expected '" + header + "'");
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
      } catch (const std::exception&) {
        throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != cols) {
      throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(cols) + " columns, got " +
                                     std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 5) throw Error(ErrorCode::io, "field file has fewer than 5 rows");
  return rows;
}

Grid grid_from_rows(const std::vector<std::vector<double>>& rows) {
  const double L = -rows.front()[0];
  const int N = static_cast<int>(rows.size()) - 2;
  Grid g = Grid::make(L, N);
  if (std::abs(rows.back()[0] - L) > 1e-9 * std::max(1.0, L)) {
    throw Error(ErrorCode::io, "field file does not span a symmetric interval [-L, L]");
  }
  for (int i = 0; i < N; ++i) {
    if (std::abs(rows[i + 1][0] - g.x(i)) > 1e-9 * std::max(1.0, L)) {
      throw Error(ErrorCode::io, "field file nodes are not uniformly spaced");
    }
  }
  return g;
}

template <class Writer>
void write_file(const std::string& path, Writer&& w) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  w(os);
  if (!os) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return is;
}

}  // namespace

Grid Grid::make(double L, int N) {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::usage, "grid half-width L must be positive");
  if (N < 3) throw Error(ErrorCode::usage, "grid needs N >= 3 interior nodes");
  if (N % 2 == 0) throw Error(ErrorCode::usage, "grid N must be odd so that x=0 is a node");
  return Grid{L, N, 2.0 * L / (N + 1)};
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(N);
  for (int i = 0; i < N; ++i) xs[i] = x(i);
  return xs;
}

double Grid::integrate(const std::vector<double>& f, double f_left, double f_right) const {
  double acc = 0.5 * (f_left + f_right);
  for (double v : f) acc += v;
  return acc * h;
}

double default_half_width(const PotentialSpec& spec, double margin) {
  const double ea = 0.5 * min_eig(hess_W(spec, spec.a_state()));
  const double eb = 0.5 * min_eig(hess_W(spec, spec.b_state()));
  const double rate = std::sqrt(std::max(0.0, std::min(ea, eb)));
  if (!(rate > 1e-8)) {
    throw Error(ErrorCode::unsupported,
                "no exponential decay rate for " + spec.describe() + " (degenerate minimum)");
  }
  return margin / rate;
}

RealField2 RealField2::zeros(const Grid& g, const Vec2& left, const Vec2& right) {
  return RealField2{g, std::vector<double>(g.N, 0.0), std::vector<double>(g.N, 0.0), left, right};
}

RealField2 RealField2::sample(const Grid& g, const Vec2& left, const Vec2& right,
                              const std::function<Vec2(double)>& fn) {
  RealField2 U = zeros(g, left, right);
  for (int i = 0; i < g.N; ++i) {
    const Vec2 v = fn(g.x(i));
    U.u1[i] = v[0];
    U.u2[i] = v[1];
  }
  return U;
}

void RealField2::validate() const {
  if (static_cast<int>(u1.size()) != grid.N || static_cast<int>(u2.size()) != grid.N) {
    throw Error(ErrorCode::usage, "field length does not match grid");
  }
  for (int i = 0; i < grid.N; ++i) {
    if (!std::isfinite(u1[i]) || !std::isfinite(u2[i])) {
      throw Error(ErrorCode::non_finite, "non-finite field value at x=" + std::to_string(grid.x(i)));
    }
  }
}

ComplexField2 ComplexField2::from_real(const RealField2& U) {
  ComplexField2 out;
  out.grid = U.grid;
  out.psi1.assign(U.u1.begin(), U.u1.end());
  out.psi2.assign(U.u2.begin(), U.u2.end());
  out.left_bc = {U.left_bc[0], U.left_bc[1]};
  out.right_bc = {U.right_bc[0], U.right_bc[1]};
  return out;
}

ComplexField2 ComplexField2::gauge(double beta1, double beta2) const {
  ComplexField2 out = *this;
  const cplx e1 = std::polar(1.0, beta1);
  const cplx e2 = std::polar(1.0, beta2);
  for (auto& v : out.psi1) v *= e1;
  for (auto& v : out.psi2) v *= e2;
  out.left_bc = {left_bc[0] * e1, left_bc[1] * e2};
  out.right_bc = {right_bc[0] * e1, right_bc[1] * e2};
  return out;
}

void ComplexField2::validate() const {
  if (static_cast<int>(psi1.size()) != grid.N || static_cast<int>(psi2.size()) != grid.N) {
    throw Error(ErrorCode::usage, "field length does not match grid");
  }
  for (int i = 0; i < grid.N; ++i) {
    if (!std::isfinite(psi1[i].real()) || !std::isfinite(psi1[i].imag()) ||
        !std::isfinite(psi2[i].real()) || !std::isfinite(psi2[i].imag())) {
      throw Error(ErrorCode::non_finite, "non-finite field value at x=" + std::to_string(grid.x(i)));
    }
  }
}

std::vector<double> second_derivative(const Grid& g, const std::vector<double>& f, double left,
                                      double right) {
  if (static_cast<int>(f.size()) != g.N) throw Error(ErrorCode::usage, "field length does not match grid");
  std::vector<double> out(f.size());
  // schrodinger_apply computes −f″; flip the sign afterwards.
  kernels::active().schrodinger_apply(f.data(), f.size(), left, right, 1.0 / (g.h * g.h), nullptr,
                                      out.data());
  for (double& v : out) v = -v;
  return out;
}

double energy(const PotentialSpec& spec, const RealField2& U) {
  U.validate();
  const auto& k = kernels::active();
  const std::size_t n = U.u1.size();
  const double grad = k.gradient_sq_sum(U.u1.data(), n, U.left_bc[0], U.right_bc[0]) +
                      k.gradient_sq_sum(U.u2.data(), n, U.left_bc[1], U.right_bc[1]);
  std::vector<double> xi1(n), xi2(n);
  for (std::size_t i = 0; i < n; ++i) {
    xi1[i] = U.u1[i] * U.u1[i];
    xi2[i] = U.u2[i] * U.u2[i];
  }
  const double pot = k.potential_sum(xi1.data(), xi2.data(), n, detail::force_coeffs(spec));
  const double h = U.grid.h;
  const double w_ends = eval_W(spec, U.left_bc) + eval_W(spec, U.right_bc);
  return 0.5 * grad / h + 0.5 * h * (pot + 0.5 * w_ends);
}

double energy(const PotentialSpec& spec, const ComplexField2& psi) {
  psi.validate();
  const auto& k = kernels::active();
  const std::size_t n = psi.psi1.size();
  const double grad =
      k.gradient_sq_sum_complex(psi.psi1.data(), n, psi.left_bc[0], psi.right_bc[0]) +
      k.gradient_sq_sum_complex(psi.psi2.data(), n, psi.left_bc[1], psi.right_bc[1]);
  std::vector<double> xi1(n), xi2(n);
  k.modulus_sq(psi.psi1.data(), n, xi1.data());
  k.modulus_sq(psi.psi2.data(), n, xi2.data());
  const double pot = k.potential_sum(xi1.data(), xi2.data(), n, detail::force_coeffs(spec));
  const double h = psi.grid.h;
  const double w_ends =
      eval_W(spec, {std::abs(psi.left_bc[0]), std::abs(psi.left_bc[1])}) +
      eval_W(spec, {std::abs(psi.right_bc[0]), std::abs(psi.right_bc[1])});
  return 0.5 * grad / h + 0.5 * h * (pot + 0.5 * w_ends);
}

RealField2 el_residual(const PotentialSpec& spec, const RealField2& U) {
  U.validate();
  const auto& k = kernels::active();
  const std::size_t n = U.u1.size();
  std::vector<double> xi1(n), xi2(n), d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    xi1[i] = U.u1[i] * U.u1[i];
    xi2[i] = U.u2[i] * U.u2[i];
  }
  // ½∂ⱼW = uⱼ ∂ⱼF, so the residual is the Schrödinger operator with potential ∂ⱼF.
  k.force(xi1.data(), xi2.data(), n, detail::force_coeffs(spec), d1.data(), d2.data());
  RealField2 R = RealField2::zeros(U.grid, {0.0, 0.0}, {0.0, 0.0});
  const double inv_h2 = 1.0 / (U.grid.h * U.grid.h);
  k.schrodinger_apply(U.u1.data(), n, U.left_bc[0], U.right_bc[0], inv_h2, d1.data(), R.u1.data());
  k.schrodinger_apply(U.u2.data(), n, U.left_bc[1], U.right_bc[1], inv_h2, d2.data(), R.u2.data());
  return R;
}

double sup_norm(const RealField2& U) {
  double m = 0.0;
  for (std::size_t i = 0; i < U.u1.size(); ++i) m = std::max({m, std::abs(U.u1[i]), std::abs(U.u2[i])});
  return m;
}

double sup_distance(const RealField2& a, const RealField2& b) {
  require_same_grid(a.grid, b.grid, "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < a.u1.size(); ++i) {
    m = std::max({m, std::abs(a.u1[i] - b.u1[i]), std::abs(a.u2[i] - b.u2[i])});
  }
  return m;
}

double dot(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * g.h;
}

double l2_norm(const Grid& g, const std::vector<double>& f) { return std::sqrt(dot(g, f, f)); }

RealField2 derivative(const RealField2& U) {
  RealField2 D = RealField2::zeros(U.grid, {0.0, 0.0}, {0.0, 0.0});
  const int N = U.grid.N;
  const double inv2h = 0.5 / U.grid.h;
  for (int i = 0; i < N; ++i) {
    const double l1 = (i == 0) ? U.left_bc[0] : U.u1[i - 1];
    const double l2 = (i == 0) ? U.left_bc[1] : U.u2[i - 1];
    const double r1 = (i == N - 1) ? U.right_bc[0] : U.u1[i + 1];
    const double r2 = (i == N - 1) ? U.right_bc[1] : U.u2[i + 1];
    D.u1[i] = (r1 - l1) * inv2h;
    D.u2[i] = (r2 - l2) * inv2h;
  }
  return D;
}

double rho_A(const ComplexField2& psi, const ComplexField2& phi, double A) {
  require_same_grid(psi.grid, phi.grid, "rho_A");
  if (!(A > 0.0) || A > psi.grid.L) throw Error(ErrorCode::usage, "rho_A needs 0 < A <= L");
  const Grid& g = psi.grid;
  const int N = g.N;
  double total = 0.0;
  for (int j = 0; j < 2; ++j) {
    const auto& a = (j == 0) ? psi.psi1 : psi.psi2;
    const auto& b = (j == 0) ? phi.psi1 : phi.psi2;
    auto diff = [&](int i) -> cplx {
      if (i < 0) return psi.left_bc[j] - phi.left_bc[j];
      if (i >= N) return psi.right_bc[j] - phi.right_bc[j];
      return a[i] - b[i];
    };
    double grad = 0.0;
    for (int i = -1; i < N; ++i) grad += std::norm(diff(i + 1) - diff(i));
    double mod = 0.0;
    double sup = 0.0;
    for (int i = 0; i < N; ++i) {
      const double dm = std::abs(a[i]) - std::abs(b[i]);
      mod += dm * dm;
      if (std::abs(g.x(i)) <= A + 1e-12 * g.L) sup = std::max(sup, std::abs(a[i] - b[i]));
    }
    const double dm_l = std::abs(psi.left_bc[j]) - std::abs(phi.left_bc[j]);
    const double dm_r = std::abs(psi.right_bc[j]) - std::abs(phi.right_bc[j]);
    mod += 0.5 * (dm_l * dm_l + dm_r * dm_r);
    total += std::sqrt(grad / g.h) + std::sqrt(mod * g.h) + sup;
  }
  return total;
}

double interpolate(const Grid& g, const std::vector<double>& f, double left, double right, double x) {
  const int N = g.N;
  return cubic_at<double>(g, x, [&](int k) {
    if (k < 0) return left;
    if (k >= N) return right;
    return f[k];
  });
}

RealField2 translate(const RealField2& U, double shift) {
  RealField2 V = U;
  for (int i = 0; i < U.grid.N; ++i) {
    const double x = U.grid.x(i) - shift;
    V.u1[i] = interpolate(U.grid, U.u1, U.left_bc[0], U.right_bc[0], x);
    V.u2[i] = interpolate(U.grid, U.u2, U.left_bc[1], U.right_bc[1], x);
  }
  return V;
}

ComplexField2 translate(const ComplexField2& psi, double shift) {
  ComplexField2 out = psi;
  const Grid& g = psi.grid;
  const int N = g.N;
  for (int j = 0; j < 2; ++j) {
    const auto& src = (j == 0) ? psi.psi1 : psi.psi2;
    auto& dst = (j == 0) ? out.psi1 : out.psi2;
    for (int i = 0; i < N; ++i) {
      dst[i] = cubic_at<cplx>(g, g.x(i) - shift, [&](int k) {
        if (k < 0) return psi.left_bc[j];
        if (k >= N) return psi.right_bc[j];
        return src[k];
      });
    }
  }
  return out;
}

void write_csv(std::ostream& os, const RealField2& U) {
  const Grid& g = U.grid;
  os << "x,u1,u2\n";
  os << fmt17(-g.L) << ',' << fmt17(U.left_bc[0]) << ',' << fmt17(U.left_bc[1]) << '\n';
  for (int i = 0; i < g.N; ++i) {
    os << fmt17(g.x(i)) << ',' << fmt17(U.u1[i]) << ',' << fmt17(U.u2[i]) << '\n';
  }
  os << fmt17(g.L) << ',' << fmt17(U.right_bc[0]) << ',' << fmt17(U.right_bc[1]) << '\n';
}

void write_csv(std::ostream& os, const ComplexField2& psi) {
  const Grid& g = psi.grid;
  auto row = [&](double x, cplx a, cplx b) {
    os << fmt17(x) << ',' << fmt17(a.real()) << ',' << fmt17(a.imag()) << ',' << fmt17(b.real())
       << ',' << fmt17(b.imag()) << '\n';
  };
  os << "x,re_psi1,im_psi1,re_psi2,im_psi2\n";
  row(-g.L, psi.left_bc[0], psi.left_bc[1]);
  for (int i = 0; i < g.N; ++i) row(g.x(i), psi.psi1[i], psi.psi2[i]);
  row(g.L, psi.right_bc[0], psi.right_bc[1]);
}

void write_csv(const std::string& path, const RealField2& U) {
  write_file(path, [&](std::ostream& os) { write_csv(os, U); });
}

void write_csv(const std::string& path, const ComplexField2& psi) {
  write_file(path, [&](std::ostream& os) { write_csv(os, psi); });
}

RealField2 read_real_csv(std::istream& is) {
  const auto rows = read_rows(is, "x,u1,u2", 3);
  const Grid g = grid_from_rows(rows);
  RealField2 U = RealField2::zeros(g, {rows.front()[1], rows.front()[2]},
                                   {rows.back()[1], rows.back()[2]});
  for (int i = 0; i < g.N; ++i) {
    U.u1[i] = rows[i + 1][1];
    U.u2[i] = rows[i + 1][2];
  }
  U.validate();
  return U;
}

RealField2 read_real_csv(const std::string& path) {
  auto is = open_in(path);
  return read_real_csv(is);
}

ComplexField2 read_complex_csv(std::istream& is) {
  const auto rows = read_rows(is, "x,re_psi1,im_psi1,re_psi2,im_psi2", 5);
  ComplexField2 psi;
  psi.grid = grid_from_rows(rows);
  auto c1 = [](const std::vector<double>& r) { return cplx(r[1], r[2]); };
  auto c2 = [](const std::vector<double>& r) { return cplx(r[3], r[4]); };
  psi.left_bc = {c1(rows.front()), c2(rows.front())};
  psi.right_bc = {c1(rows.back()), c2(rows.back())};
  for (int i = 0; i < psi.grid.N; ++i) {
    psi.psi1.push_back(c1(rows[i + 1]));
    psi.psi2.push_back(c2(rows[i + 1]));
  }
  psi.validate();
  return psi;
}

ComplexField2 read_complex_csv(const std::string& path) {
  auto is = open_in(path);
  return read_complex_csv(is);
}

}  // namespace wallforge
