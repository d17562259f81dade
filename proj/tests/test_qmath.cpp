#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/qmath.hpp"

using namespace rydsim;
using namespace rydsim::qmath;
using consts::pi;

namespace {

CMatrix pauli(char which) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (which) {
    case 'i': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

// Small deterministic pseudo-random matrix generator for property tests.
CMatrix lcg_matrix(int n, unsigned seed) {
  unsigned s = seed;
  auto next = [&s]() {
    s = 1664525u * s + 1013904223u;
    return static_cast<double>(s) / 4294967296.0 - 0.5;
  };
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(next(), next());
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("kron of Pauli matrices") {
  const CMatrix zx = kron(pauli('z'), pauli('x'));
  CHECK(zx.rows() == 4);
  CHECK(zx(0, 1) == cplx(1, 0));
  CHECK(zx(1, 0) == cplx(1, 0));
  CHECK(zx(2, 3) == cplx(-1, 0));
  CHECK(zx(3, 2) == cplx(-1, 0));
  CHECK(zx.cwiseAbs().sum() == doctest::Approx(4.0));

  // Mixed-product property (A kron B)(C kron D) = AC kron BD.
  const CMatrix a = lcg_matrix(3, 1), b = lcg_matrix(2, 2), c = lcg_matrix(3, 3),
                d = lcg_matrix(2, 4);
  CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
}

TEST_CASE("expm exact small cases") {
  // Nilpotent: exp([[0,1],[0,0]]) = [[1,1],[0,1]].
  CMatrix n = CMatrix::Zero(2, 2);
  n(0, 1) = 1;
  CMatrix en = expm(n);
  CHECK(max_abs_diff(en, CMatrix::Identity(2, 2) + n) < 1e-15);

  // Qubit rotation: exp(-i (pi/2) sx) = -i sx.
  CMatrix r = expm(cplx(0, -pi / 2) * pauli('x'));
  CHECK(std::abs(r(0, 0)) < 1e-14);
  CHECK(std::abs(r(0, 1) - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(r(1, 0) - cplx(0, -1)) < 1e-14);

  // Diagonal with large norm exercises the squaring path.
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 20.0;
  d(1, 1) = -3.0;
  CMatrix ed = expm(d);
  CHECK(ed(0, 0).real() == doctest::Approx(4.851651954097903e8).epsilon(1e-12));
  CHECK(ed(1, 1).real() == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));

  // Damped rotation with closed form:
  // exp([[a, c],[c, a]]) = e^a [[cosh c, sinh c],[sinh c, cosh c]].
  const cplx a(-0.15, 0.0), c(0.0, 0.7);
  CMatrix m(2, 2);
  m << a, c, c, a;
  CMatrix em = expm(m);
  const double f = std::exp(-0.15);
  CHECK(std::abs(em(0, 0) - f * std::cos(0.7)) < 1e-14);
  CHECK(std::abs(em(0, 1) - cplx(0, f * std::sin(0.7))) < 1e-14);
}

TEST_CASE("expm properties on dense random matrices") {
  const CMatrix a = 3.0 * lcg_matrix(8, 7);
  // Inverse property.
  CHECK(max_abs_diff(expm(a) * expm(-a), CMatrix::Identity(8, 8)) < 1e-11);
  // Consistency of the scaling step: exp(A) == exp(A/2)^2.
  const CMatrix half = expm(a / 2.0);
  CHECK(max_abs_diff(expm(a), half * half) < 1e-11);
  // Similarity: exp(P A P^-1) = P exp(A) P^-1.
  const CMatrix p = lcg_matrix(8, 9) + 4.0 * CMatrix::Identity(8, 8);
  const CMatrix pinv = p.partialPivLu().inverse();
  CHECK(max_abs_diff(expm(p * a * pinv), p * expm(a) * pinv) < 1e-9);
  // Call counter is live.
  CHECK(expm_call_count() > 0);
}

TEST_CASE("sqrtm_psd") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  CHECK(max_abs_diff(sqrtm_psd(d), (CMatrix(2, 2) << 2, 0, 0, 3).finished()) < 1e-14);

  // [[2,1],[1,2]] has eigenvalues {1,3}.
  CMatrix m(2, 2);
  m << 2, 1, 1, 2;
  CMatrix s = sqrtm_psd(m);
  const double sp = (std::sqrt(3.0) + 1) / 2, sm = (std::sqrt(3.0) - 1) / 2;
  CHECK(std::abs(s(0, 0) - sp) < 1e-13);
  CHECK(std::abs(s(0, 1) - sm) < 1e-13);
  CHECK(max_abs_diff(s * s, m) < 1e-13);

  // Tiny negative eigenvalues are clamped...
  CMatrix tiny = CMatrix::Zero(2, 2);
  tiny(0, 0) = -1e-10;
  tiny(1, 1) = 1.0;
  CHECK(sqrtm_psd(tiny)(0, 0).real() == doctest::Approx(0.0));
  // ...but genuinely indefinite input throws.
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = -1e-3;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS((void)sqrtm_psd(bad), std::domain_error);
  // Non-Hermitian input throws too.
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS((void)sqrtm_psd(nh), std::domain_error);
}

TEST_CASE("trace_norm_half") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = -2;
  CHECK(trace_norm_half(d) == doctest::Approx(1.5).epsilon(1e-12));

  CMatrix n = CMatrix::Zero(2, 2);
  n(0, 1) = 1;  // single singular value 1
  CHECK(trace_norm_half(n) == doctest::Approx(0.5).epsilon(1e-12));

  // Unitarily invariant: ||U A||_1 = ||A||_1.
  const CMatrix a = lcg_matrix(5, 11);
  const CMatrix u = expm(cplx(0, 1) * (lcg_matrix(5, 12) + lcg_matrix(5, 12).adjoint()));
  CHECK(trace_norm_half(u * a) == doctest::Approx(trace_norm_half(a)).epsilon(1e-10));
}

TEST_CASE("project_computational") {
  // Mark a known 4x4 sub-block inside a 25x25 host matrix.
  CMatrix host = CMatrix::Zero(25, 25);
  const std::array<int, 4> map{0, 2, 10, 12};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      host(map[i], map[j]) = cplx(10 * i + j, i - j);
  host(3, 3) = 0.7;  // population outside the computational block
  auto [rho4, loss] = project_computational(host, map);
  CHECK(rho4(2, 1).real() == doctest::Approx(21.0));
  CHECK(rho4(2, 1).imag() == doctest::Approx(1.0));
  // Tr of the block is 0 + 11 + 22 + 33 = 66 -> loss = 1 - 66.
  CHECK(loss == doctest::Approx(1.0 - 66.0).epsilon(1e-12));

  // Physical case: normalized diagonal with leakage.
  CMatrix rho = CMatrix::Zero(25, 25);
  rho(0, 0) = 0.5;
  rho(12, 12) = 0.3;
  rho(4, 4) = 0.2;  // leaked population
  auto [blk, l2] = project_computational(rho, map);
  CHECK(blk.trace().real() == doctest::Approx(0.8));
  CHECK(l2 == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("hermiticity and eigenvalue helpers") {
  CHECK(is_hermitian(pauli('y')));
  CHECK_FALSE(is_hermitian(cplx(0, 1) * pauli('y') + pauli('x')));
  CHECK(min_eigenvalue_hermitian(pauli('z')) == doctest::Approx(-1.0));
}
