#pragma once

// Piecewise-constant pulse sequences and master-equation propagation.
//
// A sequence is a list of segments: Rydberg pulses (two-photon rotations of
// one atom), free gaps, and instantaneous ideal operations on the {|0>,|1>}
// subspace. During pulses and gaps the two-atom density matrix evolves under
// the Lindblad generator built from the per-shot parameters; ideal rotations
// are exact unitaries applied between segments.
//
// Frames: the lab-frame Hamiltonian keeps |0> at -omega10. Ideal qubit
// rotations are defined in the qubit co-rotating frame, so at elapsed time t
// they are applied as W(t) R W(t)^dagger with W(t) = diag(e^{i omega10 t}) on
// |0>; run_sequence returns the final state transformed into that frame
// (populations are unaffected; qubit coherences become frame-stationary).
//
// Detuning bookkeeping (5-level): the Hamiltonian's bare two-photon detuning
// is shot.deltaR plus the beam-induced Stark shift recomputed from the shot's
// sampled couplings. The dynamics then generates the local Stark shift
// itself, so the *effective* detuning of the drive equals shot.deltaR, and
// the same diagonal stays valid during gaps (the bare detuning does not
// depend on the beam amplitudes). The 6-level model is intrinsic-only: the
// shot's detuning/dephasing fields are not part of the scheme.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rydsim/atoms.hpp"
#include "rydsim/noise.hpp"

namespace rydsim {

enum class Atom { Control, Target };
enum class RotAxis { X, Y, Z };
enum class Method { Expm, Rk4 };
enum class ModelKind { FiveLevel, SixLevel };

/// Two-photon rotation of one atom by `area` radians; `phase` is applied to
/// the blue Rabi coupling (5-level) or to all Rydberg couplings of the pulsed
/// atom (6-level). The other atom's couplings are off during the pulse.
struct RydbergPulse {
  Atom atom = Atom::Control;
  double area = 0;
  double phase = 0;
};

/// Free evolution with all Rabi couplings off; decay and dephasing stay on.
struct Gap {
  double duration = 0;
};

/// Instantaneous rotation exp(-i angle sigma_axis / 2) on {|0>,|1>} of one
/// atom (identity elsewhere).
struct IdealRotation {
  Atom atom = Atom::Control;
  RotAxis axis = RotAxis::X;
  double angle = 0;
};

/// Instantaneous phase e^{i angle} on |1> of one atom.
struct PhaseZ {
  Atom atom = Atom::Control;
  double angle = 0;
};

using Segment = std::variant<RydbergPulse, Gap, IdealRotation, PhaseZ>;

struct PulseSequence {
  std::vector<Segment> segments;
  std::string label;
};

/// Static gate parameters: the nominal single-atom scheme for the active
/// model plus integration settings. For the 5-level model base5 holds the
/// nominal (unsampled) couplings used for pulse timing; per-shot couplings
/// come from the Shot. For the 6-level model base6/blockade6 define the
/// intrinsic pair completely.
struct GateModel {
  ModelKind kind = ModelKind::FiveLevel;
  AtomScheme5 base5;
  AtomScheme6 base6;
  BlockadeSpec blockade6 = BlockadeSpec::scalar(0);  ///< 3x3 for 6-level runs
  int rk4Divisor = 40;  ///< RK4 steps per fastest period

  int levels() const { return kind == ModelKind::FiveLevel ? 5 : 6; }
  /// Nominal rotation rate: |Omega_R Omega_B| / 2|Delta_p| (5-level) or the
  /// principal Rydberg coupling (6-level). Throws if undefined.
  double two_photon_rabi() const;
  double pi_time() const;  ///< pi / two_photon_rabi()
};

/// Cache of segment propagators, keyed by a hash of the generator contents
/// and the duration. Phase-shifted pulses reuse the unphased exponential via
/// a diagonal conjugation, so one entry serves every blue-laser phase.
struct PropagatorCache {
  std::unordered_map<std::uint64_t, CMatrix> table;
  std::size_t hits = 0;
  std::size_t misses = 0;
  void clear() {
    table.clear();
    hits = misses = 0;
  }
};

/// pi_c -- gap -- 2pi_t -- gap -- pi_c. Gaps are omitted when tGap <= 0.
///
/// The raw sequence realizes the controlled phase up to deterministic
/// single-qubit Z phases from the pulses' light shifts (for balanced legs the
/// driven |1> level shifts by half the two-photon Rabi frequency, so a 2pi
/// pulse adds -pi on top of the rotation's own sign flip). Experiments
/// calibrate these away; use nominal_z_phases + z_corrected to do the same.
PulseSequence standard_cz(double tGap = 500e-9);
/// Standard sequence with the target 2pi split into pi(0) + pi(laser phase
/// -phi) and a trailing PhaseZ(target, -phi). The split pair deposits the
/// deliberate phase +phi on the singly-driven |01> branch only, so
/// phi = pi Omega / 2B cancels the blockade phase error of the |11> branch.
PulseSequence modified_cz(double phi, double tGap = 500e-9);
/// R_x(pi/2)_t -- C_Z core -- R_x(-pi/2)_t. The ideal-mode probability truth
/// table is the permutation {00->01, 01->00, 10->10, 11->11}.
PulseSequence cnot(double tGap = 500e-9);
/// cnot() preceded by R_x(pi/2)_c: from |11> preparation the ideal output is
/// the Bell state (|00>+|11>)/sqrt(2).
PulseSequence bell_prep_cnot(double tGap = 500e-9);

/// Wrap a controlled-phase core in the target-rotation sandwich that turns it
/// into a CNOT, or additionally prepend the control R_x(pi/2) for Bell-state
/// preparation.
PulseSequence cnot_from_core(const PulseSequence& core);
PulseSequence bell_from_core(const PulseSequence& core);

/// Copy of the model with every decay and dephasing rate set to zero; used as
/// the reference system when calibrating deterministic phases.
GateModel without_decay(GateModel gate);

/// Measure the deterministic single-qubit Z phases {thetaC, thetaT} a
/// diagonal (controlled-phase) core imprints relative to the ideal
/// diag(1,-1,-1,-1), by propagating the uniform superposition of the four
/// computational states and reading the arguments of the |00><01| and
/// |00><10| coherences. Pass a decay-free gate (without_decay) and an
/// ideal/noise-free shot so the phases are the nominal calibration values.
/// Throws std::runtime_error if a reference coherence vanishes.
std::array<double, 2> nominal_z_phases(const PulseSequence& core,
                                       const GateModel& gate, const Shot& shot,
                                       Method method = Method::Expm,
                                       PropagatorCache* cache = nullptr);

/// Core with PhaseZ(control, -thetaC) and PhaseZ(target, -thetaT) appended so
/// that the calibrated phases cancel and only the entangling residual remains.
PulseSequence z_corrected(PulseSequence core, double thetaC, double thetaT);

/// Propagate rho for time t under G = -i(H rho - rho H) + unvec(L vec(rho))
/// given dense H (N x N) and the Lindblad superoperator L (N^2 x N^2).
/// expm: rho(t) = unvec(expm(G t) vec(rho)). rk4: classic fixed step with
/// h <= 1/(divisor * f_max), hermitizing after every step.
/// Throws std::runtime_error("integration diverged") on non-finite entries.
CMatrix propagate_dense(const CMatrix& rho, const CMatrix& h, const CMatrix& lsuper,
                        double t, Method method, int rk4Divisor = 40);

/// Same contract for a structured two-atom generator; the expm path consults
/// and fills the cache when one is supplied (rk4 never caches).
CMatrix propagate_generator(const CMatrix& rho, const TwoAtomGenerator& gen,
                            double t, Method method, int rk4Divisor = 40,
                            PropagatorCache* cache = nullptr);

/// Apply a pulse sequence to rho0 for one noise shot. rho0 must be N x N
/// with N = 25 (5-level) or 36 (6-level). Returns the final state in the
/// qubit rotating frame.
CMatrix run_sequence(const CMatrix& rho0, const PulseSequence& seq,
                     const Shot& shot, const GateModel& gate, Method method,
                     PropagatorCache* cache = nullptr);

} // namespace rydsim
