#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace wallforge::kernels {

namespace {

constexpr std::size_t kWidth = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void schrodinger_apply(const double* f, std::size_t n, double left, double right, double inv_h2,
                       const double* pot, double* out) {
  if (n < kWidth + 2) {
    scalar_table().schrodinger_apply(f, n, left, right, inv_h2, pot, out);
    return;
  }
  auto edge = [&](std::size_t i) {
    const double fm = (i == 0) ? left : f[i - 1];
    const double fp = (i + 1 == n) ? right : f[i + 1];
    double v = -(fm - 2.0 * f[i] + fp) * inv_h2;
    if (pot != nullptr) v += pot[i] * f[i];
    out[i] = v;
  };
  edge(0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ninv = _mm256_set1_pd(-inv_h2);
  std::size_t i = 1;
  for (; i + kWidth <= n - 1; i += kWidth) {
    const __m256d fm = _mm256_loadu_pd(f + i - 1);
    const __m256d fc = _mm256_loadu_pd(f + i);
    const __m256d fp = _mm256_loadu_pd(f + i + 1);
    const __m256d lap = _mm256_fnmadd_pd(two, fc, _mm256_add_pd(fm, fp));
    __m256d v = _mm256_mul_pd(lap, ninv);
    if (pot != nullptr) v = _mm256_fmadd_pd(_mm256_loadu_pd(pot + i), fc, v);
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) edge(i);
}

void force(const double* xi1, const double* xi2, std::size_t n, const ForceCoeffs& c, double* d1,
           double* d2) {
  const __m256d c1 = _mm256_set1_pd(c.c1);
  const __m256d c2 = _mm256_set1_pd(c.c2);
  const __m256d mu = _mm256_set1_pd(c.mu);
  std::size_t i = 0;
  if (c.degree == 1) {
    const __m256d k1 = _mm256_set1_pd(2.0 * c.alpha * c.c1);
    const __m256d k2 = _mm256_set1_pd(2.0 * c.alpha * c.c2);
    const __m256d beta = _mm256_set1_pd(c.beta);
    for (; i + kWidth <= n; i += kWidth) {
      const __m256d x1 = _mm256_loadu_pd(xi1 + i);
      const __m256d x2 = _mm256_loadu_pd(xi2 + i);
      const __m256d s = _mm256_sub_pd(_mm256_fmadd_pd(c1, x1, _mm256_mul_pd(c2, x2)), mu);
      _mm256_storeu_pd(d1 + i, _mm256_fmadd_pd(k1, s, _mm256_mul_pd(beta, x2)));
      _mm256_storeu_pd(d2 + i, _mm256_fmadd_pd(k2, s, _mm256_mul_pd(beta, x1)));
    }
  } else {
    const __m256d k1 = _mm256_set1_pd(4.0 * c.alpha * c.c1);
    const __m256d k2 = _mm256_set1_pd(4.0 * c.alpha * c.c2);
    const __m256d b2 = _mm256_set1_pd(2.0 * c.beta);
    for (; i + kWidth <= n; i += kWidth) {
      const __m256d x1 = _mm256_loadu_pd(xi1 + i);
      const __m256d x2 = _mm256_loadu_pd(xi2 + i);
      const __m256d t1 = _mm256_mul_pd(x1, x1);
      const __m256d t2 = _mm256_mul_pd(x2, x2);
      const __m256d s = _mm256_sub_pd(_mm256_fmadd_pd(c1, t1, _mm256_mul_pd(c2, t2)), mu);
      _mm256_storeu_pd(d1 + i, _mm256_mul_pd(x1, _mm256_fmadd_pd(k1, s, _mm256_mul_pd(b2, t2))));
      _mm256_storeu_pd(d2 + i, _mm256_mul_pd(x2, _mm256_fmadd_pd(k2, s, _mm256_mul_pd(b2, t1))));
    }
  }
  if (i < n) scalar_table().force(xi1 + i, xi2 + i, n - i, c, d1 + i, d2 + i);
}

double potential_sum(const double* xi1, const double* xi2, std::size_t n, const ForceCoeffs& c) {
  const __m256d c1 = _mm256_set1_pd(c.c1);
  const __m256d c2 = _mm256_set1_pd(c.c2);
  const __m256d mu = _mm256_set1_pd(c.mu);
  const __m256d alpha = _mm256_set1_pd(c.alpha);
  const __m256d beta = _mm256_set1_pd(c.beta);
  const bool quartic = c.degree != 1;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d t1 = _mm256_loadu_pd(xi1 + i);
    __m256d t2 = _mm256_loadu_pd(xi2 + i);
    if (quartic) {
      t1 = _mm256_mul_pd(t1, t1);
      t2 = _mm256_mul_pd(t2, t2);
    }
    const __m256d s = _mm256_sub_pd(_mm256_fmadd_pd(c1, t1, _mm256_mul_pd(c2, t2)), mu);
    const __m256d f = _mm256_fmadd_pd(_mm256_mul_pd(alpha, s), s, _mm256_mul_pd(beta, _mm256_mul_pd(t1, t2)));
    acc = _mm256_add_pd(acc, f);
  }
  double total = hsum(acc);
  if (i < n) total += scalar_table().potential_sum(xi1 + i, xi2 + i, n - i, c);
  return total;
}

/// Σ (a[k + stride] − a[k])² for k in [0, m).
double strided_diff_sq(const double* a, std::size_t m, std::size_t stride) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kWidth <= m; k += kWidth) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k + stride), _mm256_loadu_pd(a + k));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double total = hsum(acc);
  for (; k < m; ++k) {
    const double d = a[k + stride] - a[k];
    total += d * d;
  }
  return total;
}

double gradient_sq_sum(const double* f, std::size_t n, double left, double right) {
  if (n == 0) return (right - left) * (right - left);
  double total = (f[0] - left) * (f[0] - left) + (right - f[n - 1]) * (right - f[n - 1]);
  return total + strided_diff_sq(f, n - 1, 1);
}

double gradient_sq_sum_complex(const cplx* f, std::size_t n, cplx left, cplx right) {
  if (n == 0) return std::norm(right - left);
  const double* a = reinterpret_cast<const double*>(f);
  double total = std::norm(f[0] - left) + std::norm(right - f[n - 1]);
  return total + strided_diff_sq(a, 2 * (n - 1), 2);
}

void modulus_sq(const cplx* psi, std::size_t n, double* out) {
  const double* a = reinterpret_cast<const double*>(psi);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d p01 = _mm256_loadu_pd(a + 2 * i);
    const __m256d p23 = _mm256_loadu_pd(a + 2 * i + 4);
    // hadd yields (|p0|², |p2|², |p1|², |p3|²); restore order.
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(p01, p01), _mm256_mul_pd(p23, p23));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) out[i] = std::norm(psi[i]);
}

// sin/cos on four lanes: three-part π/2 reduction followed by minimax
// polynomials on [−π/4, π/4] and a quadrant fix-up.
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2_1 = 1.57079632673412561417e+00;
constexpr double kPio2_2 = 6.07710050630396597660e-11;
constexpr double kPio2_2t = 2.02226624879595063154e-21;

constexpr double kSin[] = {1.58962301576546568060e-10, -2.50507477628578072866e-08,
                           2.75573136213857245213e-06, -1.98412698295895385996e-04,
                           8.33333333332211858878e-03, -1.66666666666666307295e-01};
constexpr double kCos[] = {-1.13585365213876817300e-11, 2.08757008419747316778e-09,
                           -2.75573141792967388112e-07, 2.48015872888517045348e-05,
                           -1.38888888888730564116e-03, 4.16666666666665929218e-02};

inline __m256d poly6(const double* c, __m256d z) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int k = 1; k < 6; ++k) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[k]));
  return p;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_1), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_2), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_2t), r);

  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly6(kSin, z), r);
  const __m256d cos_r = _mm256_fmadd_pd(
      _mm256_mul_pd(z, z), poly6(kCos, z),
      _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  const __m256i qi = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(qi, two), 62));
  const __m256d cos_sign = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), 62));

  s_out = _mm256_xor_pd(_mm256_blendv_pd(sin_r, cos_r, swap), sin_sign);
  c_out = _mm256_xor_pd(_mm256_blendv_pd(cos_r, sin_r, swap), cos_sign);
}

void phase_rotate(cplx* psi, const double* rate, std::size_t n, double tau) {
  double* a = reinterpret_cast<double*>(psi);
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d alt = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d s, c;
    sincos4(_mm256_mul_pd(_mm256_loadu_pd(rate + i), vtau), s, c);
    const __m256d c_lo = _mm256_permute4x64_pd(c, 0b01010000);
    const __m256d c_hi = _mm256_permute4x64_pd(c, 0b11111010);
    const __m256d s_lo = _mm256_mul_pd(_mm256_permute4x64_pd(s, 0b01010000), alt);
    const __m256d s_hi = _mm256_mul_pd(_mm256_permute4x64_pd(s, 0b11111010), alt);
    const __m256d p01 = _mm256_loadu_pd(a + 2 * i);
    const __m256d p23 = _mm256_loadu_pd(a + 2 * i + 4);
    // (re, im)·(c − i s) = (re c + im s, im c − re s)
    _mm256_storeu_pd(a + 2 * i,
                     _mm256_fmadd_pd(p01, c_lo, _mm256_mul_pd(_mm256_permute_pd(p01, 0b0101), s_lo)));
    _mm256_storeu_pd(a + 2 * i + 4,
                     _mm256_fmadd_pd(p23, c_hi, _mm256_mul_pd(_mm256_permute_pd(p23, 0b0101), s_hi)));
  }
  if (i < n) scalar_table().phase_rotate(psi + i, rate + i, n - i, tau);
}

void cn_rhs(const cplx* psi, std::size_t n, cplx left, cplx right, double r, cplx* out) {
  if (n < 4) {
    scalar_table().cn_rhs(psi, n, left, right, r, out);
    return;
  }
  auto edge = [&](std::size_t i) {
    const cplx pm = (i == 0) ? left : psi[i - 1];
    const cplx pp = (i + 1 == n) ? right : psi[i + 1];
    const cplx lap = pm - 2.0 * psi[i] + pp;
    out[i] = cplx(psi[i].real() - r * lap.imag(), psi[i].imag() + r * lap.real());
  };
  edge(0);
  const double* a = reinterpret_cast<const double*>(psi);
  double* o = reinterpret_cast<double*>(out);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d rs = _mm256_setr_pd(-r, r, -r, r);
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    const __m256d pm = _mm256_loadu_pd(a + 2 * (i - 1));
    const __m256d pc = _mm256_loadu_pd(a + 2 * i);
    const __m256d pp = _mm256_loadu_pd(a + 2 * (i + 1));
    const __m256d lap = _mm256_fnmadd_pd(two, pc, _mm256_add_pd(pm, pp));
    _mm256_storeu_pd(o + 2 * i, _mm256_fmadd_pd(_mm256_permute_pd(lap, 0b0101), rs, pc));
  }
  for (; i < n; ++i) edge(i);
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2",          schrodinger_apply, force,        potential_sum,
                                 gradient_sq_sum, gradient_sq_sum_complex, modulus_sq, phase_rotate,
                                 cn_rhs};
  return table;
}

}  // namespace wallforge::kernels
