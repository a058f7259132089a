#include "wallforge/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace wallforge::kernels;

namespace {

// Lengths that exercise the vector body and every remainder.
constexpr std::size_t kLengths[] = {1, 3, 4, 7, 37, 1024, 4095};

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

std::vector<cplx> random_cvec(std::size_t n, std::mt19937_64& rng) {
  const auto re = random_vec(n, rng), im = random_vec(n, rng);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

void check_close(double a, double b, double tol = 1e-13) {
  CHECK(std::abs(a - b) <= tol * (1.0 + std::abs(b)));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("AVX2 kernels reproduce the scalar reference") {
  const KernelTable* avx = avx2_table();
  if (avx == nullptr) {
    MESSAGE("AVX2 table unavailable on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_table();
  std::mt19937_64 rng(2024);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto f = random_vec(n, rng), pot = random_vec(n, rng);
    std::vector<double> a(n), b(n);
    ref.schrodinger_apply(f.data(), n, 0.3, -0.2, 17.0, pot.data(), a.data());
    avx->schrodinger_apply(f.data(), n, 0.3, -0.2, 17.0, pot.data(), b.data());
    for (std::size_t i = 0; i < n; ++i) check_close(b[i], a[i]);
    ref.schrodinger_apply(f.data(), n, 0.3, -0.2, 17.0, nullptr, a.data());
    avx->schrodinger_apply(f.data(), n, 0.3, -0.2, 17.0, nullptr, b.data());
    for (std::size_t i = 0; i < n; ++i) check_close(b[i], a[i]);

    const auto xi1 = random_vec(n, rng, 0.0, 1.5), xi2 = random_vec(n, rng, 0.0, 1.5);
    for (int degree : {1, 2}) {
      const ForceCoeffs c{degree, 0.5, 1.2, 0.8, 1.0, 1.3};
      std::vector<double> a1(n), a2(n), b1(n), b2(n);
      ref.force(xi1.data(), xi2.data(), n, c, a1.data(), a2.data());
      avx->force(xi1.data(), xi2.data(), n, c, b1.data(), b2.data());
      for (std::size_t i = 0; i < n; ++i) {
        check_close(b1[i], a1[i]);
        check_close(b2[i], a2[i]);
      }
      check_close(avx->potential_sum(xi1.data(), xi2.data(), n, c),
                  ref.potential_sum(xi1.data(), xi2.data(), n, c), 1e-12);
    }
    check_close(avx->gradient_sq_sum(f.data(), n, 1.0, 0.0), ref.gradient_sq_sum(f.data(), n, 1.0, 0.0), 1e-12);

    const auto psi = random_cvec(n, rng);
    check_close(avx->gradient_sq_sum_complex(psi.data(), n, {1.0, 0.2}, {0.0, -0.3}),
                ref.gradient_sq_sum_complex(psi.data(), n, {1.0, 0.2}, {0.0, -0.3}), 1e-12);
    ref.modulus_sq(psi.data(), n, a.data());
    avx->modulus_sq(psi.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) check_close(b[i], a[i]);

    auto pa = psi, pb = psi;
    const auto rate = random_vec(n, rng, -2.0, 2.0);
    ref.phase_rotate(pa.data(), rate.data(), n, 0.37);
    avx->phase_rotate(pb.data(), rate.data(), n, 0.37);
    for (std::size_t i = 0; i < n; ++i) {
      check_close(pb[i].real(), pa[i].real());
      check_close(pb[i].imag(), pa[i].imag());
    }

    std::vector<cplx> ca(n), cb(n);
    ref.cn_rhs(psi.data(), n, {1.0, 0.0}, {0.0, 0.5}, 3.5, ca.data());
    avx->cn_rhs(psi.data(), n, {1.0, 0.0}, {0.0, 0.5}, 3.5, cb.data());
    for (std::size_t i = 0; i < n; ++i) {
      check_close(cb[i].real(), ca[i].real());
      check_close(cb[i].imag(), ca[i].imag());
    }
  }
}

TEST_CASE("scalar kernels match hand-written formulas") {
  const std::vector<double> f{1.0, 2.0, 4.0};
  std::vector<double> out(3);
  scalar_table().schrodinger_apply(f.data(), 3, 0.5, 3.0, 1.0, nullptr, out.data());
  CHECK(out[0] == doctest::Approx(-(0.5 - 2.0 + 2.0)));
  CHECK(out[1] == doctest::Approx(-(1.0 - 4.0 + 4.0)));
  CHECK(out[2] == doctest::Approx(-(2.0 - 8.0 + 3.0)));
  // Edges: 0.5→1, 1→2, 2→4, 4→3.
  CHECK(scalar_table().gradient_sq_sum(f.data(), 3, 0.5, 3.0) == doctest::Approx(0.25 + 1 + 4 + 1));
}

TEST_CASE("table selection by name") {
  const char* before = active().name;
  CHECK(select("scalar"));
  CHECK(std::string(active().name) == "scalar");
  CHECK_FALSE(select("sse9"));
  CHECK(std::string(active().name) == "scalar");
  CHECK(select("auto"));
  if (avx2_table() != nullptr) CHECK(std::string(active().name) == avx2_table()->name);
  (void)before;
}

}  // TEST_SUITE
