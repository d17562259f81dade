#include "rydsim/atoms.hpp"

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/qmath.hpp"

namespace rydsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_branching(const std::array<double, 3>& b, const char* name) {
  double sum = 0;
  for (double w : b) {
    require(w >= 0.0, name);
    sum += w;
  }
  require(std::abs(sum - 1.0) < 1e-9, name);
}

CMatrix dense_h(const SingleAtomGenerator& g) {
  CMatrix h = CMatrix::Zero(g.n, g.n);
  for (int k = 0; k < g.n; ++k) h(k, k) = g.hdiag(k);
  for (const auto& [i, j, c] : g.couplings) {
    h(i, j) = c;
    h(j, i) = std::conj(c);
  }
  return h;
}

CMatrix dense_l(const SingleAtomGenerator& g) {
  const int n = g.n;
  CMatrix l = CMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int v = qmath::vec_index(i, j, n);
      l(v, v) -= g.damp(i, j);
    }
  for (const auto& [dst, src, w] : g.feeds)
    l(qmath::vec_index(dst, dst, n), qmath::vec_index(src, src, n)) += w;
  return l;
}

} // namespace

void AtomScheme5::validate() const {
  require(omega10 >= 0, "AtomScheme5.omega10 must be >= 0");
  require(gammaP >= 0, "AtomScheme5.gammaP must be >= 0");
  require(gammaR >= 0, "AtomScheme5.gammaR must be >= 0");
  require(gammaPh >= 0, "AtomScheme5.gammaPh must be >= 0");
  require(gamma01 >= 0, "AtomScheme5.gamma01 must be >= 0");
  check_branching(branching, "AtomScheme5.branching must be nonnegative and sum to 1");
}

void AtomScheme6::validate() const {
  require(omega10 >= 0, "AtomScheme6.omega10 must be >= 0");
  require(gammaR >= 0, "AtomScheme6.gammaR must be >= 0");
  require(omegaRR1 != 0, "AtomScheme6.omegaRR1 must be nonzero");
  require(omegaRR2 != 0, "AtomScheme6.omegaRR2 must be nonzero");
  check_branching(groundBranching,
                  "AtomScheme6.groundBranching must be nonnegative and sum to 1");
}

BlockadeSpec BlockadeSpec::scalar(double b) {
  BlockadeSpec s;
  s.shifts = RMatrix::Constant(1, 1, b);
  return s;
}

BlockadeSpec BlockadeSpec::matrix3(const RMatrix& m) {
  if (m.rows() != 3 || m.cols() != 3)
    throw std::invalid_argument("BlockadeSpec::matrix3 expects a 3x3 matrix");
  BlockadeSpec s;
  s.shifts = m;
  return s;
}

SingleAtomGenerator structured_h5(const AtomScheme5& s) {
  s.validate();
  SingleAtomGenerator g;
  g.n = 5;
  g.hdiag = RVector::Zero(5);
  g.hdiag << -s.omega10, 0.0, 0.0, s.deltaP, s.deltaR;
  // Upper triangle carries the conjugated coupling so that the lower triangle
  // (raising part) holds Omega/2 itself.
  if (s.omegaR != cplx(0, 0)) {
    g.couplings.emplace_back(0, 3, std::conj(s.omegaR) / 2.0);
    g.couplings.emplace_back(2, 3, std::conj(s.omegaR) / 2.0);
  }
  if (s.omegaB != cplx(0, 0)) g.couplings.emplace_back(3, 4, std::conj(s.omegaB) / 2.0);

  // gammaPh acts as pure dephasing of the Rydberg level (jump
  // sqrt(gammaPh)|r><r|), so every coherence involving |r> damps by an extra
  // gammaPh/2; restricting it to the driven 1-r coherence alone would not be a
  // completely positive map and produces negative populations at large gammaPh.
  const double g1r = s.gammaR + s.gammaPh;
  RMatrix d = RMatrix::Zero(5, 5);
  d(3, 3) = s.gammaP;
  d(4, 4) = s.gammaR;
  d(0, 2) = d(2, 0) = s.gamma01 / 2.0;
  d(0, 3) = d(3, 0) = s.gammaP / 2.0;
  d(1, 3) = d(3, 1) = s.gammaP / 2.0;
  d(2, 3) = d(3, 2) = s.gammaP / 2.0;
  d(0, 4) = d(4, 0) = g1r / 2.0;
  d(1, 4) = d(4, 1) = g1r / 2.0;
  d(2, 4) = d(4, 2) = g1r / 2.0;
  d(3, 4) = d(4, 3) = (s.gammaP + g1r) / 2.0;
  g.damp = d;

  if (s.gammaP > 0) {
    g.feeds.emplace_back(0, 3, s.branching[0] * s.gammaP);
    g.feeds.emplace_back(1, 3, s.branching[1] * s.gammaP);
    g.feeds.emplace_back(2, 3, s.branching[2] * s.gammaP);
  }
  if (s.gammaR > 0) g.feeds.emplace_back(3, 4, s.gammaR);
  return g;
}

SingleAtomGenerator structured_h6(const AtomScheme6& s) {
  s.validate();
  SingleAtomGenerator g;
  g.n = 6;
  g.hdiag = RVector::Zero(6);
  g.hdiag << -s.omega10, 0.0, 0.0, -s.omegaRR2, -s.omegaRR1, 0.0;
  // Couplings to {|r2>, |r1>, |r>} = indices {3, 4, 5} from both qubit states.
  const std::array<int, 3> ryd{5, 4, 3};  // rabi[0] -> |r>, [1] -> |r1>, [2] -> |r2>
  for (int k = 0; k < 3; ++k) {
    if (s.rabi[k] == cplx(0, 0)) continue;
    g.couplings.emplace_back(0, ryd[k], std::conj(s.rabi[k]) / 2.0);
    g.couplings.emplace_back(2, ryd[k], std::conj(s.rabi[k]) / 2.0);
  }

  RMatrix d = RMatrix::Zero(6, 6);
  for (int i = 3; i < 6; ++i)
    for (int j = 3; j < 6; ++j) d(i, j) = s.gammaR;  // whole Rydberg block
  for (int q = 0; q < 3; ++q)
    for (int i = 3; i < 6; ++i) d(q, i) = d(i, q) = s.gammaR / 2.0;
  g.damp = d;

  if (s.gammaR > 0)
    for (int q = 0; q < 3; ++q)
      for (int i = 3; i < 6; ++i)
        g.feeds.emplace_back(q, i, s.groundBranching[q] * s.gammaR);
  return g;
}

CMatrix build_h5(const AtomScheme5& s) { return dense_h(structured_h5(s)); }
CMatrix build_l5_superop(const AtomScheme5& s) { return dense_l(structured_h5(s)); }
CMatrix build_h6(const AtomScheme6& s) { return dense_h(structured_h6(s)); }
CMatrix build_l6_superop(const AtomScheme6& s) { return dense_l(structured_h6(s)); }

TwoAtomGenerator compose_two_atom(const SingleAtomGenerator& c,
                                  const SingleAtomGenerator& t,
                                  const BlockadeSpec& b) {
  if (c.n != t.n) throw std::invalid_argument("compose_two_atom: dimension mismatch");
  TwoAtomGenerator g;
  g.n = c.n;
  g.ctrl = c;
  g.tgt = t;
  g.bshift = RMatrix::Zero(g.n, g.n);
  if (b.isScalar()) {
    if (g.n != 5)
      throw std::invalid_argument("compose_two_atom: scalar blockade requires 5-level atoms");
    g.bshift(4, 4) = b.shifts(0, 0);
  } else {
    if (g.n != 6)
      throw std::invalid_argument("compose_two_atom: 3x3 blockade requires 6-level atoms");
    g.bshift.block(3, 3, 3, 3) = b.shifts;
  }
  return g;
}

CMatrix TwoAtomGenerator::hamiltonian() const {
  const CMatrix hc = dense_h(ctrl), ht = dense_h(tgt);
  const CMatrix eye = CMatrix::Identity(n, n);
  CMatrix h = qmath::kron(hc, eye) + qmath::kron(eye, ht);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i * n + j, i * n + j) += bshift(i, j);
  return h;
}

CMatrix TwoAtomGenerator::lindblad_superop() const {
  return lift_superop(dense_l(ctrl), n, 0) + lift_superop(dense_l(tgt), n, 1);
}

CMatrix TwoAtomGenerator::liouvillian() const {
  const CMatrix h = hamiltonian();
  const int N = dim();
  const CMatrix eye = CMatrix::Identity(N, N);
  return cplx(0, -1) * (qmath::kron(eye, h) - qmath::kron(h.transpose(), eye)) +
         lindblad_superop();
}

void TwoAtomGenerator::apply_rhs(const CMatrix& rho, CMatrix& out,
                                 CMatrix& scratch) const {
  const int N = dim();
  // scratch = H rho, exploiting the sparse structure of H.
  for (int ci = 0; ci < n; ++ci)
    for (int ti = 0; ti < n; ++ti) {
      const int row = ci * n + ti;
      scratch.row(row) =
          (ctrl.hdiag(ci) + tgt.hdiag(ti) + bshift(ci, ti)) * rho.row(row);
    }
  for (const auto& [i, j, c] : ctrl.couplings) {
    const cplx cc = std::conj(c);
    for (int t = 0; t < n; ++t) {
      scratch.row(i * n + t) += c * rho.row(j * n + t);
      scratch.row(j * n + t) += cc * rho.row(i * n + t);
    }
  }
  for (const auto& [i, j, c] : tgt.couplings) {
    const cplx cc = std::conj(c);
    for (int a = 0; a < n; ++a) {
      scratch.row(a * n + i) += c * rho.row(a * n + j);
      scratch.row(a * n + j) += cc * rho.row(a * n + i);
    }
  }
  // -i [H, rho] for Hermitian rho: H rho - (H rho)^dagger.
  out.noalias() = scratch - scratch.adjoint();
  out *= cplx(0, -1);
  // Entrywise damping.
  for (int c1 = 0; c1 < n; ++c1)
    for (int t1 = 0; t1 < n; ++t1) {
      const int row = c1 * n + t1;
      for (int c2 = 0; c2 < n; ++c2)
        for (int t2 = 0; t2 < n; ++t2)
          out(row, c2 * n + t2) -=
              (ctrl.damp(c1, c2) + tgt.damp(t1, t2)) * rho(row, c2 * n + t2);
    }
  // Population feeds.
  for (const auto& [dst, src, w] : ctrl.feeds)
    out.block(dst * n, dst * n, n, n) += w * rho.block(src * n, src * n, n, n);
  for (const auto& [dst, src, w] : tgt.feeds)
    for (int c1 = 0; c1 < n; ++c1)
      for (int c2 = 0; c2 < n; ++c2)
        out(c1 * n + dst, c2 * n + dst) += w * rho(c1 * n + src, c2 * n + src);
  (void)N;
}

double TwoAtomGenerator::max_frequency_hz() const {
  double m = 0;
  auto upd = [&m](double v) { m = std::max(m, std::abs(v)); };
  for (int i = 0; i < n; ++i) {
    upd(ctrl.hdiag(i));
    upd(tgt.hdiag(i));
    for (int j = 0; j < n; ++j) upd(bshift(i, j));
  }
  for (const auto& [i, j, c] : ctrl.couplings) upd(std::abs(c));
  for (const auto& [i, j, c] : tgt.couplings) upd(std::abs(c));
  double rate = std::max(ctrl.damp.maxCoeff(), tgt.damp.maxCoeff());
  return std::max(m, rate) / consts::two_pi;
}

std::pair<CMatrix, CMatrix> compose_two_atom_dense(const CMatrix& hc,
                                                   const CMatrix& ht,
                                                   const CMatrix& lc,
                                                   const CMatrix& lt,
                                                   const BlockadeSpec& b) {
  const int n = static_cast<int>(hc.rows());
  const CMatrix eye = CMatrix::Identity(n, n);
  CMatrix h = qmath::kron(hc, eye) + qmath::kron(eye, ht);
  if (b.isScalar()) {
    h(4 * n + 4, 4 * n + 4) += b.shifts(0, 0);
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        h((3 + i) * n + 3 + j, (3 + i) * n + 3 + j) += b.shifts(i, j);
  }
  return {h, lift_superop(lc, n, 0) + lift_superop(lt, n, 1)};
}

CMatrix lift_superop(const CMatrix& ls, int n, int which) {
  const int N = n * n;
  CMatrix out = CMatrix::Zero(N * N, N * N);
  // Row/column index of rho_ct entry (I=(c1,t1), J=(c2,t2)) under column
  // stacking is J*N + I. The single-atom superoperator acts on its factor's
  // index pair with the other factor's indices carried along diagonally.
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2)
      for (int a3 = 0; a3 < n; ++a3)
        for (int a4 = 0; a4 < n; ++a4) {
          const cplx v = ls(qmath::vec_index(a1, a2, n), qmath::vec_index(a3, a4, n));
          if (v == cplx(0, 0)) continue;
          for (int b1 = 0; b1 < n; ++b1)
            for (int b2 = 0; b2 < n; ++b2) {
              int I, J, K, L;
              if (which == 0) {
                I = a1 * n + b1; J = a2 * n + b2;
                K = a3 * n + b1; L = a4 * n + b2;
              } else {
                I = b1 * n + a1; J = b2 * n + a2;
                K = b1 * n + a3; L = b2 * n + a4;
              }
              out(qmath::vec_index(I, J, N), qmath::vec_index(K, L, N)) += v;
            }
        }
  return out;
}

std::array<int, 4> computational_indices(int n) {
  return {0, 2, 2 * n, 2 * n + 2};
}

} // namespace rydsim
