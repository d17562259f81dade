#include "rydsim/evolve.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rydsim/constants.hpp"
#include "rydsim/qmath.hpp"

namespace rydsim {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void hash_bytes(std::uint64_t& h, const void* data, std::size_t nbytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof v); }

void hash_int(std::uint64_t& h, std::int64_t v) { hash_bytes(h, &v, sizeof v); }

void hash_single(std::uint64_t& h, const SingleAtomGenerator& s) {
  hash_int(h, s.n);
  for (int i = 0; i < s.hdiag.size(); ++i) hash_double(h, s.hdiag[i]);
  hash_int(h, static_cast<std::int64_t>(s.couplings.size()));
  for (const auto& [i, j, c] : s.couplings) {
    hash_int(h, i);
    hash_int(h, j);
    hash_double(h, c.real());
    hash_double(h, c.imag());
  }
  for (int j = 0; j < s.damp.cols(); ++j)
    for (int i = 0; i < s.damp.rows(); ++i) hash_double(h, s.damp(i, j));
  hash_int(h, static_cast<std::int64_t>(s.feeds.size()));
  for (const auto& [dst, src, w] : s.feeds) {
    hash_int(h, dst);
    hash_int(h, src);
    hash_double(h, w);
  }
}

std::uint64_t propagator_key(const TwoAtomGenerator& gen, double t) {
  std::uint64_t h = kFnvOffset;
  hash_int(h, gen.n);
  hash_single(h, gen.ctrl);
  hash_single(h, gen.tgt);
  for (int j = 0; j < gen.bshift.cols(); ++j)
    for (int i = 0; i < gen.bshift.rows(); ++i) hash_double(h, gen.bshift(i, j));
  hash_double(h, t);
  return h;
}

CMatrix apply_superop(const CMatrix& prop, const CMatrix& rho) {
  const int N = static_cast<int>(rho.rows());
  Eigen::Map<const CVector> v(rho.data(), N * N);
  const CVector w = prop * v;
  CMatrix out = Eigen::Map<const CMatrix>(w.data(), N, N);
  if (!out.allFinite()) throw std::runtime_error("integration diverged");
  return out;
}

long step_count(double t, double fmaxHz, int divisor) {
  const double raw = t * divisor * fmaxHz;
  if (!(raw > 0)) return 1;
  return static_cast<long>(std::ceil(raw));
}

/// One RK4 sweep with per-step re-hermitization and divergence checks;
/// `rhs` evaluates the generator into its second argument.
template <typename Rhs>
CMatrix rk4_sweep(CMatrix rho, double t, long nSteps, Rhs&& rhs) {
  const double h = t / static_cast<double>(nSteps);
  const auto N = rho.rows();
  CMatrix k1(N, N), k2(N, N), k3(N, N), k4(N, N), tmp(N, N), herm(N, N);
  for (long s = 0; s < nSteps; ++s) {
    rhs(rho, k1);
    tmp = rho + (h / 2) * k1;
    rhs(tmp, k2);
    tmp = rho + (h / 2) * k2;
    rhs(tmp, k3);
    tmp = rho + h * k3;
    rhs(tmp, k4);
    rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    herm = rho.adjoint();
    rho = 0.5 * (rho + herm);
    if (!rho.allFinite()) throw std::runtime_error("integration diverged");
  }
  return rho;
}

/// Per-shot single-atom scheme: couplings toggle with the drive, the bare
/// two-photon detuning (shot detuning plus the beam Stark shift recomputed
/// from the sampled couplings) and the dephasing stay on all the time.
AtomScheme5 shot_scheme5(const AtomScheme5& base, cplx omegaR, cplx omegaB,
                         double deltaR, double gammaPh, bool driven,
                         double phase) {
  AtomScheme5 a = base;
  const double stark =
      base.deltaP != 0
          ? (std::norm(omegaR) - std::norm(omegaB)) / (4.0 * std::abs(base.deltaP))
          : 0.0;
  a.deltaR = deltaR + stark;
  a.gammaPh = gammaPh;
  if (driven) {
    a.omegaR = omegaR;
    a.omegaB = omegaB * std::polar(1.0, phase);
  } else {
    a.omegaR = a.omegaB = cplx(0, 0);
  }
  return a;
}

TwoAtomGenerator segment_generator(const GateModel& gate, const Shot& shot,
                                   std::optional<Atom> driven, double phase) {
  if (gate.kind == ModelKind::FiveLevel) {
    const auto c =
        shot_scheme5(gate.base5, shot.omegaRC, shot.omegaBC, shot.deltaRC,
                     shot.gammaPhC, driven == Atom::Control, phase);
    const auto t =
        shot_scheme5(gate.base5, shot.omegaRT, shot.omegaBT, shot.deltaRT,
                     shot.gammaPhT, driven == Atom::Target, phase);
    return compose_two_atom(structured_h5(c), structured_h5(t),
                            BlockadeSpec::scalar(shot.blockade));
  }
  auto scheme = [&](bool on) {
    AtomScheme6 a = gate.base6;
    for (auto& r : a.rabi) r = on ? r * std::polar(1.0, phase) : cplx(0, 0);
    return a;
  };
  return compose_two_atom(structured_h6(scheme(driven == Atom::Control)),
                          structured_h6(scheme(driven == Atom::Target)),
                          gate.blockade6);
}

bool is_rydberg_index(int level, int n) { return n == 5 ? level == 4 : level >= 3; }

/// rho_ab *= e^{i theta (ryd_a - ryd_b)} over the pulsed atom's Rydberg
/// indicator; conjugating a propagator by this diagonal shifts the blue-laser
/// phase of that atom's couplings.
void apply_rydberg_phase(CMatrix& rho, int n, Atom atom, double theta) {
  const int N = n * n;
  std::vector<int> ryd(N);
  for (int c = 0; c < n; ++c)
    for (int t = 0; t < n; ++t)
      ryd[c * n + t] = is_rydberg_index(atom == Atom::Control ? c : t, n) ? 1 : 0;
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < N; ++a)
      if (const int d = ryd[a] - ryd[b]; d != 0)
        rho(a, b) *= std::polar(1.0, theta * d);
}

Eigen::Matrix2cd qubit_rotation(RotAxis axis, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Eigen::Matrix2cd r;
  switch (axis) {
  case RotAxis::X:
    r << cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0);
    break;
  case RotAxis::Y:
    r << cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0);
    break;
  case RotAxis::Z:
  default:
    r << std::polar(1.0, -angle / 2), cplx(0, 0), cplx(0, 0),
        std::polar(1.0, angle / 2);
    break;
  }
  return r;
}

/// Embed a {|0>,|1>}-subspace unitary for one atom, conjugated into the lab
/// frame at the current elapsed time, and apply it to rho.
void apply_qubit_unitary(CMatrix& rho, int n, Atom atom,
                         const Eigen::Matrix2cd& u2, double omega10,
                         double elapsed) {
  CMatrix u = CMatrix::Identity(n, n);
  const cplx w = std::polar(1.0, omega10 * elapsed);
  u(0, 0) = u2(0, 0);
  u(0, 2) = u2(0, 1) * w;
  u(2, 0) = u2(1, 0) * std::conj(w);
  u(2, 2) = u2(1, 1);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix full =
      atom == Atom::Control ? qmath::kron(u, id) : qmath::kron(id, u);
  rho = full * rho * full.adjoint();
}

/// rho <- W(T)^dagger rho W(T) with W = diag(e^{i omega10 T} on |0>) per atom.
void to_qubit_frame(CMatrix& rho, int n, double omega10, double elapsed) {
  const double ang = omega10 * elapsed;
  if (ang == 0) return;
  const int N = n * n;
  std::vector<int> zeros(N);
  for (int c = 0; c < n; ++c)
    for (int t = 0; t < n; ++t) zeros[c * n + t] = (c == 0) + (t == 0);
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < N; ++a)
      if (const int d = zeros[b] - zeros[a]; d != 0)
        rho(a, b) *= std::polar(1.0, ang * d);
}

} // namespace

double GateModel::two_photon_rabi() const {
  if (kind == ModelKind::FiveLevel) {
    if (base5.deltaP == 0)
      throw std::invalid_argument("GateModel: deltaP must be nonzero");
    const double o = std::abs(base5.omegaR) * std::abs(base5.omegaB) /
                     (2.0 * std::abs(base5.deltaP));
    if (o <= 0)
      throw std::invalid_argument("GateModel: two-photon Rabi undefined");
    return o;
  }
  const double o = std::abs(base6.rabi[0]);
  if (o <= 0)
    throw std::invalid_argument("GateModel: Rydberg coupling undefined");
  return o;
}

double GateModel::pi_time() const { return consts::pi / two_photon_rabi(); }

PulseSequence standard_cz(double tGap) {
  PulseSequence s;
  s.label = "standard_cz";
  s.segments.push_back(RydbergPulse{Atom::Control, consts::pi, 0.0});
  if (tGap > 0) s.segments.push_back(Gap{tGap});
  s.segments.push_back(RydbergPulse{Atom::Target, consts::two_pi, 0.0});
  if (tGap > 0) s.segments.push_back(Gap{tGap});
  s.segments.push_back(RydbergPulse{Atom::Control, consts::pi, 0.0});
  return s;
}

PulseSequence modified_cz(double phi, double tGap) {
  PulseSequence s;
  s.label = "modified_cz";
  s.segments.push_back(RydbergPulse{Atom::Control, consts::pi, 0.0});
  if (tGap > 0) s.segments.push_back(Gap{tGap});
  s.segments.push_back(RydbergPulse{Atom::Target, consts::pi, 0.0});
  // pi(0) followed by pi(psi) sends |1> to -e^{-i psi}|1>, so the laser phase
  // -phi deposits +phi on the singly-driven branch, matching the blockade
  // phase the |11> branch picks up when phi = pi Omega / 2B.
  s.segments.push_back(RydbergPulse{Atom::Target, consts::pi, -phi});
  if (tGap > 0) s.segments.push_back(Gap{tGap});
  s.segments.push_back(RydbergPulse{Atom::Control, consts::pi, 0.0});
  s.segments.push_back(PhaseZ{Atom::Target, -phi});
  return s;
}

PulseSequence cnot(double tGap) {
  PulseSequence s = standard_cz(tGap);
  s.label = "cnot";
  s.segments.insert(s.segments.begin(),
                    IdealRotation{Atom::Target, RotAxis::X, consts::pi / 2});
  s.segments.push_back(IdealRotation{Atom::Target, RotAxis::X, -consts::pi / 2});
  return s;
}

PulseSequence bell_prep_cnot(double tGap) {
  PulseSequence s = cnot(tGap);
  s.label = "bell_prep_cnot";
  s.segments.insert(s.segments.begin(),
                    IdealRotation{Atom::Control, RotAxis::X, consts::pi / 2});
  return s;
}

CMatrix propagate_dense(const CMatrix& rho, const CMatrix& h,
                        const CMatrix& lsuper, double t, Method method,
                        int rk4Divisor) {
  const int N = static_cast<int>(rho.rows());
  if (h.rows() != N || h.cols() != N || lsuper.rows() != N * N ||
      lsuper.cols() != N * N || rho.cols() != N)
    throw std::invalid_argument("propagate_dense: dimension mismatch");
  if (t < 0) throw std::invalid_argument("propagate_dense: negative duration");
  if (method == Method::Expm) {
    const CMatrix id = CMatrix::Identity(N, N);
    const CMatrix g =
        -iu * (qmath::kron(id, h) - qmath::kron(h.transpose(), id)) + lsuper;
    return apply_superop(qmath::expm(g * t), rho);
  }
  const double fmax =
      std::max(h.size() ? h.cwiseAbs().maxCoeff() : 0.0,
               lsuper.size() ? lsuper.cwiseAbs().maxCoeff() : 0.0) /
      consts::two_pi;
  const long n = step_count(t, fmax, rk4Divisor);
  return rk4_sweep(rho, t, n, [&](const CMatrix& r, CMatrix& out) {
    out = -iu * (h * r - r * h);
    Eigen::Map<const CVector> v(r.data(), N * N);
    const CVector lv = lsuper * v;
    out += Eigen::Map<const CMatrix>(lv.data(), N, N);
  });
}

CMatrix propagate_generator(const CMatrix& rho, const TwoAtomGenerator& gen,
                            double t, Method method, int rk4Divisor,
                            PropagatorCache* cache) {
  const int N = gen.dim();
  if (rho.rows() != N || rho.cols() != N)
    throw std::invalid_argument("propagate_generator: dimension mismatch");
  if (t < 0)
    throw std::invalid_argument("propagate_generator: negative duration");
  if (t == 0) return rho;
  if (method == Method::Expm) {
    if (cache) {
      const auto key = propagator_key(gen, t);
      auto it = cache->table.find(key);
      if (it == cache->table.end()) {
        ++cache->misses;
        it = cache->table.emplace(key, qmath::expm(gen.liouvillian() * t)).first;
      } else {
        ++cache->hits;
      }
      return apply_superop(it->second, rho);
    }
    return apply_superop(qmath::expm(gen.liouvillian() * t), rho);
  }
  const long n = step_count(t, gen.max_frequency_hz(), rk4Divisor);
  CMatrix scratch(N, N);
  return rk4_sweep(rho, t, n, [&](const CMatrix& r, CMatrix& out) {
    gen.apply_rhs(r, out, scratch);
  });
}

CMatrix run_sequence(const CMatrix& rho0, const PulseSequence& seq,
                     const Shot& shot, const GateModel& gate, Method method,
                     PropagatorCache* cache) {
  if (seq.segments.empty())
    throw std::invalid_argument("run_sequence: empty sequence");
  const int n = gate.levels();
  const int N = n * n;
  if (rho0.rows() != N || rho0.cols() != N)
    throw std::invalid_argument("run_sequence: state dimension mismatch");
  const double omega10 =
      gate.kind == ModelKind::FiveLevel ? gate.base5.omega10 : gate.base6.omega10;

  CMatrix rho = rho0;
  double elapsed = 0;
  for (const Segment& seg : seq.segments) {
    if (const auto* p = std::get_if<RydbergPulse>(&seg)) {
      if (p->area < 0)
        throw std::invalid_argument("run_sequence: negative pulse area");
      if (p->area == 0) continue;
      const double t = p->area / gate.two_photon_rabi();
      if (method == Method::Expm) {
        // one cached exponential serves every blue-laser phase: conjugate the
        // state by the diagonal e^{i phase} on the pulsed atom's Rydberg
        // levels instead of re-exponentiating (the phased Hamiltonian is
        // U H0 U^dagger with U that diagonal)
        const auto gen = segment_generator(gate, shot, p->atom, 0.0);
        if (p->phase != 0) apply_rydberg_phase(rho, n, p->atom, -p->phase);
        rho = propagate_generator(rho, gen, t, method, gate.rk4Divisor, cache);
        if (p->phase != 0) apply_rydberg_phase(rho, n, p->atom, p->phase);
      } else {
        const auto gen = segment_generator(gate, shot, p->atom, p->phase);
        rho = propagate_generator(rho, gen, t, method, gate.rk4Divisor, cache);
      }
      elapsed += t;
    } else if (const auto* g = std::get_if<Gap>(&seg)) {
      if (g->duration < 0)
        throw std::invalid_argument("run_sequence: negative gap duration");
      if (g->duration == 0) continue;
      const auto gen = segment_generator(gate, shot, std::nullopt, 0.0);
      rho = propagate_generator(rho, gen, g->duration, method, gate.rk4Divisor,
                                cache);
      elapsed += g->duration;
    } else if (const auto* r = std::get_if<IdealRotation>(&seg)) {
      apply_qubit_unitary(rho, n, r->atom, qubit_rotation(r->axis, r->angle),
                          omega10, elapsed);
    } else if (const auto* z = std::get_if<PhaseZ>(&seg)) {
      Eigen::Matrix2cd u2 = Eigen::Matrix2cd::Identity();
      u2(1, 1) = std::polar(1.0, z->angle);
      apply_qubit_unitary(rho, n, z->atom, u2, omega10, elapsed);
    }
  }
  to_qubit_frame(rho, n, omega10, elapsed);
  return rho;
}

PulseSequence cnot_from_core(const PulseSequence& core) {
  PulseSequence s = core;
  s.label = core.label + "+cnot_wrap";
  s.segments.insert(s.segments.begin(),
                    IdealRotation{Atom::Target, RotAxis::X, consts::pi / 2});
  s.segments.push_back(IdealRotation{Atom::Target, RotAxis::X, -consts::pi / 2});
  return s;
}

PulseSequence bell_from_core(const PulseSequence& core) {
  PulseSequence s = cnot_from_core(core);
  s.label = core.label + "+bell_wrap";
  s.segments.insert(s.segments.begin(),
                    IdealRotation{Atom::Control, RotAxis::X, consts::pi / 2});
  return s;
}

GateModel without_decay(GateModel gate) {
  gate.base5.gammaP = 0;
  gate.base5.gammaR = 0;
  gate.base5.gammaPh = 0;
  gate.base5.gamma01 = 0;
  gate.base6.gammaR = 0;
  return gate;
}

std::array<double, 2> nominal_z_phases(const PulseSequence& core,
                                       const GateModel& gate, const Shot& shot,
                                       Method method, PropagatorCache* cache) {
  const int n = gate.levels();
  const int N = n * n;
  const auto idx = computational_indices(n);
  CMatrix rho0 = CMatrix::Zero(N, N);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) rho0(idx[a], idx[b]) = 0.25;
  const CMatrix rho = run_sequence(rho0, core, shot, gate, method, cache);
  // With output amplitudes u_k relative to u_00, rho(00,0x) = u_00 u_0x^* / 4;
  // the ideal core has u_01 = u_10 = -1, so theta = -arg(-rho(00,0x)).
  const cplx c01 = -rho(idx[0], idx[1]);
  const cplx c10 = -rho(idx[0], idx[2]);
  if (std::abs(c01) < 1e-6 || std::abs(c10) < 1e-6)
    throw std::runtime_error(
        "nominal_z_phases: reference coherence vanished; core is not a "
        "controlled-phase sequence at these parameters");
  return {-std::arg(c10), -std::arg(c01)};
}

PulseSequence z_corrected(PulseSequence core, double thetaC, double thetaT) {
  core.label += "+zcal";
  core.segments.push_back(PhaseZ{Atom::Control, -thetaC});
  core.segments.push_back(PhaseZ{Atom::Target, -thetaT});
  return core;
}

} // namespace rydsim
