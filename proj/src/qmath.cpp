#include "rydsim/qmath.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace rydsim::qmath {

namespace {
std::atomic<long> g_expm_calls{0};

double one_norm(const CMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}
} // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

long expm_call_count() { return g_expm_calls.load(); }

CMatrix expm(const CMatrix& m) {
  g_expm_calls.fetch_add(1, std::memory_order_relaxed);
  if (m.rows() != m.cols()) throw std::invalid_argument("expm: matrix must be square");
  const Eigen::Index n = m.rows();
  const CMatrix I = CMatrix::Identity(n, n);

  // Scale so the 1-norm is at most 0.5, well inside the degree-13 Pade
  // convergence region, then undo by repeated squaring.
  const double nrm = one_norm(m);
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  CMatrix a = m / std::pow(2.0, s);

  // Degree-13 Pade coefficients.
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};

  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
           b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * I);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                    b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * I;

  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

CMatrix sqrtm_psd(const CMatrix& m) {
  if (!is_hermitian(m, 1e-9 * std::max(1.0, one_norm(m))))
    throw std::domain_error("sqrtm_psd: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0);
  RVector ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -1e-6 * scale) throw std::domain_error("sqrtm_psd: not PSD");
    if (ev(k) < 0.0) ev(k) = 0.0;
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

double trace_norm_half(const CMatrix& a) {
  // Singular values of A = sqrt of eigenvalues of A^dagger A (Hermitian PSD).
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.adjoint() * a);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    sum += std::sqrt(std::max(0.0, es.eigenvalues()(k)));
  return 0.5 * sum;
}

std::pair<CMatrix, double> project_computational(const CMatrix& rhoFull,
                                                 const std::array<int, 4>& basisMap) {
  CMatrix rho4(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho4(i, j) = rhoFull(basisMap[i], basisMap[j]);
  const double traceLoss = 1.0 - rho4.trace().real();
  return {rho4, traceLoss};
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue_hermitian(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

} // namespace rydsim::qmath
