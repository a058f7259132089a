#include "kernels_impl.hpp"

#include <cmath>

namespace wallforge::kernels {

namespace {

void schrodinger_apply(const double* f, std::size_t n, double left, double right, double inv_h2,
                       const double* pot, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double fm = (i == 0) ? left : f[i - 1];
    const double fp = (i + 1 == n) ? right : f[i + 1];
    double v = -(fm - 2.0 * f[i] + fp) * inv_h2;
    if (pot != nullptr) v += pot[i] * f[i];
    out[i] = v;
  }
}

void force(const double* xi1, const double* xi2, std::size_t n, const ForceCoeffs& c, double* d1,
           double* d2) {
  if (c.degree == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = c.c1 * xi1[i] + c.c2 * xi2[i] - c.mu;
      d1[i] = 2.0 * c.alpha * c.c1 * s + c.beta * xi2[i];
      d2[i] = 2.0 * c.alpha * c.c2 * s + c.beta * xi1[i];
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = xi1[i] * xi1[i];
    const double t2 = xi2[i] * xi2[i];
    const double s = c.c1 * t1 + c.c2 * t2 - c.mu;
    d1[i] = xi1[i] * (4.0 * c.alpha * c.c1 * s + 2.0 * c.beta * t2);
    d2[i] = xi2[i] * (4.0 * c.alpha * c.c2 * s + 2.0 * c.beta * t1);
  }
}

double potential_sum(const double* xi1, const double* xi2, std::size_t n, const ForceCoeffs& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = (c.degree == 1) ? xi1[i] : xi1[i] * xi1[i];
    const double t2 = (c.degree == 1) ? xi2[i] : xi2[i] * xi2[i];
    const double s = c.c1 * t1 + c.c2 * t2 - c.mu;
    acc += c.alpha * s * s + c.beta * t1 * t2;
  }
  return acc;
}

double gradient_sq_sum(const double* f, std::size_t n, double left, double right) {
  if (n == 0) return (right - left) * (right - left);
  double acc = (f[0] - left) * (f[0] - left);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    acc += d * d;
  }
  acc += (right - f[n - 1]) * (right - f[n - 1]);
  return acc;
}

double gradient_sq_sum_complex(const cplx* f, std::size_t n, cplx left, cplx right) {
  if (n == 0) return std::norm(right - left);
  double acc = std::norm(f[0] - left);
  for (std::size_t i = 0; i + 1 < n; ++i) acc += std::norm(f[i + 1] - f[i]);
  acc += std::norm(right - f[n - 1]);
  return acc;
}

void modulus_sq(const cplx* psi, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::norm(psi[i]);
}

void phase_rotate(cplx* psi, const double* rate, std::size_t n, double tau) {
  for (std::size_t i = 0; i < n; ++i) {
    const double th = rate[i] * tau;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double re = psi[i].real();
    const double im = psi[i].imag();
    psi[i] = cplx(re * c + im * s, im * c - re * s);
  }
}

void cn_rhs(const cplx* psi, std::size_t n, cplx left, cplx right, double r, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx pm = (i == 0) ? left : psi[i - 1];
    const cplx pp = (i + 1 == n) ? right : psi[i + 1];
    const cplx lap = pm - 2.0 * psi[i] + pp;
    out[i] = cplx(psi[i].real() - r * lap.imag(), psi[i].imag() + r * lap.real());
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",       schrodinger_apply, force,        potential_sum,
                                 gradient_sq_sum, gradient_sq_sum_complex, modulus_sq, phase_rotate,
                                 cn_rhs};
  return table;
}

}  // namespace wallforge::kernels
