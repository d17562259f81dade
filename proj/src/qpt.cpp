#include "rydsim/qpt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rydsim/atoms.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/qmath.hpp"

namespace rydsim {

namespace {

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

/// Reverse both index orders: P m P with P the anti-identity permutation.
CMatrix reversed(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m(n - 1 - i, n - 1 - j);
  return out;
}

/// Lower-triangular T with real diagonal and T^dagger T = chi (+ ridge).
/// Uses the Cholesky factorization of the index-reversed matrix: if
/// P chi P = L L^dagger then T = P L^dagger P is lower-triangular and
/// T^dagger T = chi.
CMatrix lower_factor(const CMatrix& chi) {
  const int n = static_cast<int>(chi.rows());
  const double scale = 1.0 + std::abs(chi.trace().real());
  for (double ridge = 1e-12 * scale;; ridge *= 100.0) {
    const CMatrix shifted =
        reversed(chi) + ridge * CMatrix::Identity(n, n);
    Eigen::LLT<CMatrix> llt(shifted);
    if (llt.info() == Eigen::Success)
      return reversed(CMatrix(CMatrix(llt.matrixL()).adjoint()));
    if (ridge > scale) throw std::runtime_error("lower_factor: not PSD");
  }
}

/// Keep only the free parameters of the chi = T^dagger T parametrization:
/// strictly-lower entries complex, diagonal real, upper zero.
void project_parameters(CMatrix& t) {
  const int n = static_cast<int>(t.rows());
  for (int i = 0; i < n; ++i) {
    t(i, i) = t(i, i).real();
    for (int j = i + 1; j < n; ++j) t(i, j) = 0.0;
  }
}

/// Design matrix of the linear map chi -> stacked outputs:
/// row r = 16 k + vec4(i, j), column c = 16 m + n,
/// A(r, c) = vec(E_m rho_k E_n^dagger)(i, j).
CMatrix design_matrix(const std::array<CMatrix, 16>& inputs) {
  const auto& basis = pauli_basis();
  CMatrix a(256, 256);
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) {
      const int c = 16 * m + n;
      for (int k = 0; k < 16; ++k) {
        const CMatrix term = basis[m] * inputs[k] * basis[n].adjoint();
        for (int j = 0; j < 4; ++j)
          for (int i = 0; i < 4; ++i) a(16 * k + 4 * j + i, c) = term(i, j);
      }
    }
  return a;
}

CVector stack_outputs(const std::array<CMatrix, 16>& outputs) {
  CVector b(256);
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) b(16 * k + 4 * j + i) = outputs[k](i, j);
  return b;
}

CVector flatten_chi(const CMatrix& chi) {
  CVector x(256);
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) x(16 * m + n) = chi(m, n);
  return x;
}

CMatrix unflatten_chi(const CVector& x) {
  CMatrix chi(16, 16);
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) chi(m, n) = x(16 * m + n);
  return chi;
}

bool is_physical(const CMatrix& chi) {
  return qmath::min_eigenvalue_hermitian(chi) >= -1e-10 &&
         chi.trace().real() <= 1.0 + 1e-9;
}

/// Clamp every negative eigenvalue of a Hermitian matrix to zero.
CMatrix clamp_psd(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m));
  const RVector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal().toDenseMatrix().cast<cplx>() *
         es.eigenvectors().adjoint();
}

} // namespace

const std::array<CMatrix, 16>& pauli_basis() {
  static const std::array<CMatrix, 16> basis = [] {
    std::array<CMatrix, 4> s;
    s[0] = CMatrix::Identity(2, 2);
    s[1] = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
    s[2] = (CMatrix(2, 2) << 0, -iu, iu, 0).finished();
    s[3] = (CMatrix(2, 2) << 1, 0, 0, -1).finished();
    std::array<CMatrix, 16> b;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) b[4 * i + j] = qmath::kron(s[i], s[j]);
    return b;
  }();
  return basis;
}

std::array<CMatrix, 16> input_states() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<CVector, 4> kets;
  for (auto& k : kets) k = CVector(2);
  kets[0] << 1, 0;
  kets[1] << 0, 1;
  kets[2] << r, r;
  kets[3] << r, iu * r;
  std::array<CMatrix, 16> states;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      CVector psi(4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) psi(2 * i + j) = kets[a](i) * kets[b](j);
      states[4 * a + b] = psi * psi.adjoint();
    }
  return states;
}

ChannelOutputs simulate_channel(const PulseSequence& seq, const Shot& shot,
                                const GateModel& gate, Method method,
                                PropagatorCache* cache, int threads) {
  const int n = gate.levels();
  const int dim = n * n;
  const auto idx = computational_indices(n);
  const auto inputs = input_states();

  PropagatorCache local;
  PropagatorCache* c = cache ? cache : &local;

  ChannelOutputs out;
  auto runOne = [&](int k) {
    CMatrix full = CMatrix::Zero(dim, dim);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) full(idx[a], idx[b]) = inputs[k](a, b);
    const CMatrix evolved = run_sequence(full, seq, shot, gate, method, c);
    auto projected = qmath::project_computational(evolved, idx);
    out.rho[k] = std::move(projected.first);
    out.traceLoss[k] = projected.second;
  };

  // Serial warm-up: fills the propagator cache with every segment key the
  // identical remaining simulations will need, so the workers only read it.
  runOne(0);
  const int workers = std::min(threads, 15);
  if (workers <= 1) {
    for (int k = 1; k < 16; ++k) runOne(k);
  } else {
    std::atomic<int> next{1};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < 16; k = next.fetch_add(1))
          runOne(k);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

ChannelOutputs apply_unitary_channel(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4)
    throw std::invalid_argument("apply_unitary_channel: need a 4x4 matrix");
  const auto inputs = input_states();
  ChannelOutputs out;
  for (int k = 0; k < 16; ++k) {
    out.rho[k] = u * inputs[k] * u.adjoint();
    out.traceLoss[k] = 1.0 - out.rho[k].trace().real();
  }
  return out;
}

ChiMatrix chi_linear_inversion(const std::array<CMatrix, 16>& inputs,
                               const std::array<CMatrix, 16>& outputs) {
  const CMatrix a = design_matrix(inputs);
  Eigen::FullPivLU<CMatrix> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error("chi_linear_inversion: singular design matrix");
  const CVector x = lu.solve(stack_outputs(outputs));
  ChiMatrix chi;
  chi.entries = hermitize(unflatten_chi(x));
  chi.physical = is_physical(chi.entries);
  return chi;
}

ChiMatrix chi_mle(const std::array<CMatrix, 16>& inputs,
                  const std::array<CMatrix, 16>& outputs) {
  const CMatrix a = design_matrix(inputs);
  const CVector b = stack_outputs(outputs);

  // Seed: eigenvalue-clamped (and trace-clamped) linear inversion.
  CMatrix seed;
  {
    Eigen::FullPivLU<CMatrix> lu(a);
    if (!lu.isInvertible())
      throw std::runtime_error("chi_mle: singular design matrix");
    seed = clamp_psd(unflatten_chi(CVector(lu.solve(b))));
    const double tr = seed.trace().real();
    if (tr > 1.0) seed /= tr;
    if (tr < 1e-12) seed = 0.03125 * CMatrix::Identity(16, 16);
  }
  CMatrix t = lower_factor(seed);
  project_parameters(t);

  constexpr double kPenalty = 10.0;
  auto objective = [&](const CMatrix& tt, CVector* residualOut) {
    const CVector x = flatten_chi(tt.adjoint() * tt);
    const CVector r = a * x - b;
    if (residualOut) *residualOut = r;
    const double excess = std::max(0.0, (tt.adjoint() * tt).trace().real() - 1.0);
    return r.squaredNorm() + kPenalty * excess * excess;
  };
  auto gradient = [&](const CMatrix& tt, const CVector& r) {
    const CMatrix g = unflatten_chi(CVector(a.adjoint() * r));
    const double excess =
        std::max(0.0, (tt.adjoint() * tt).trace().real() - 1.0);
    CMatrix grad = tt * (g + g.adjoint()) + 2.0 * kPenalty * excess * tt;
    project_parameters(grad);
    return grad;
  };

  CVector r;
  double j = objective(t, &r);
  CMatrix grad = gradient(t, r);

  CMatrix tBest = t;
  double jBest = j;
  CMatrix tPrev, gradPrev;
  long iter = 0;
  const long maxIter = 100000;
  for (; iter < maxIter; ++iter) {
    const double gnorm = grad.norm();
    if (gnorm < 1e-10) break;

    double step = 0.0;
    if (iter > 0) {
      const CMatrix s = t - tPrev;
      const CMatrix y = grad - gradPrev;
      const double sy = s.cwiseProduct(y.conjugate()).sum().real();
      if (sy > 1e-300) step = s.squaredNorm() / sy;  // Barzilai-Borwein
    }
    tPrev = t;
    gradPrev = grad;
    if (step > 0.0 && std::isfinite(step)) {
      t -= step * grad;
    } else {
      // Backtracking line search for the first step and for BB resets.
      step = (1.0 + t.norm()) / (gnorm + 1e-300);
      CMatrix trial;
      for (int h = 0; h < 80; ++h, step *= 0.5) {
        trial = t - step * grad;
        if (objective(trial, nullptr) < j) break;
      }
      t = trial;
    }
    j = objective(t, &r);
    grad = gradient(t, r);
    if (j < jBest) {
      jBest = j;
      tBest = t;
    }
  }
  if (j > jBest) t = tBest;

  ChiMatrix chi;
  chi.entries = hermitize(t.adjoint() * t);
  const double tr = chi.entries.trace().real();
  if (tr > 1.0 + 1e-9) chi.entries /= tr;  // final projection onto Tr <= 1
  chi.physical = true;
  const CVector rFinal = a * flatten_chi(chi.entries) - b;
  chi.residual = rFinal.squaredNorm();
  chi.iterations = iter;
  return chi;
}

ChiMatrix chi_ideal(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4)
    throw std::invalid_argument("chi_ideal: need a 4x4 matrix");
  if ((u.adjoint() * u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("chi_ideal: input is not unitary");
  const auto& basis = pauli_basis();
  CVector c(16);
  for (int m = 0; m < 16; ++m) c(m) = (basis[m].adjoint() * u).trace() / 4.0;
  ChiMatrix chi;
  chi.entries = c * c.adjoint();
  chi.physical = true;
  return chi;
}

CMatrix cz_unitary() {
  CMatrix u = CMatrix::Identity(4, 4);
  u(1, 1) = u(2, 2) = u(3, 3) = -1.0;
  return u;
}

double error_overlap(const ChiMatrix& chiId, const ChiMatrix& chiSim) {
  const CMatrix id = hermitize(chiId.entries);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(chiSim.entries));
  const RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrtSim = es.eigenvectors() *
                          lam.asDiagonal().toDenseMatrix().cast<cplx>() *
                          es.eigenvectors().adjoint();
  const CMatrix inner = hermitize(sqrtSim * id * sqrtSim);
  const double tr = qmath::sqrtm_psd(inner).trace().real();
  return 1.0 - tr * tr;
}

double error_distance(const ChiMatrix& chiId, const ChiMatrix& chiSim) {
  return qmath::trace_norm_half(hermitize(chiId.entries) -
                                hermitize(chiSim.entries));
}

std::array<double, 2> epsilon_bounds(double eO, double eD) {
  return {eO / 2.0, eD};
}

double calibrate_phase(const GateModel& gate, const Shot& shot,
                       const CalibrationOptions& opts) {
  const double omega = gate.two_photon_rabi();
  const double brr = gate.kind == ModelKind::FiveLevel ? shot.blockade
                                                       : gate.blockade6.rr();
  if (brr <= 0)
    throw std::invalid_argument(
        "calibrate_phase: blockade shift must be positive");
  if (!opts.numeric) return consts::pi * omega / (2.0 * brr);

  PropagatorCache local;
  PropagatorCache* cache = opts.cache ? opts.cache : &local;
  const GateModel bare = without_decay(gate);
  const auto inputs = input_states();
  const ChiMatrix id = chi_ideal(cz_unitary());
  auto merit = [&](double phi) {
    PulseSequence seq = modified_cz(phi, opts.tGap);
    if (opts.zCalibrated) {
      const auto th = nominal_z_phases(seq, bare, shot, opts.method, cache);
      seq = z_corrected(seq, th[0], th[1]);
    }
    const ChannelOutputs ch =
        simulate_channel(seq, shot, gate, opts.method, cache, 1);
    return error_distance(id, chi_mle(inputs, ch.rho));
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = consts::two_pi * omega / brr;
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double fc = merit(c), fd = merit(d);
  while (hi - lo > 1e-4) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = merit(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = merit(d);
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace rydsim
