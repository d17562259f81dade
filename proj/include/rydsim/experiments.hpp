#pragma once

// Monte Carlo experiment orchestration: CNOT probability truth table,
// Bell-state generation, and the intrinsic-error parameter sweeps, with
// shot-level statistics.
//
// Every experiment draws one technical-noise realization per shot with
// seed = base seed + shot index, so the outcome is bit-for-bit reproducible
// for any worker count (shots are independent and reduced in index order).
// Single-qubit rotations are ideal unitaries; the deterministic light-shift
// phases of the pulsed gate core are cancelled once per configuration with
// nominal_z_phases / z_corrected before the composite sequences are built.

#include <cstdint>
#include <utility>
#include <vector>

#include "rydsim/atoms.hpp"
#include "rydsim/evolve.hpp"
#include "rydsim/noise.hpp"
#include "rydsim/types.hpp"

namespace rydsim {

struct ExperimentConfig {
  TrapParams trap;
  BeamParams beams;
  MagneticModel mag;
  BlockadeModel blockade;

  ModelKind model = ModelKind::FiveLevel;
  double omega10 = 0;  ///< qubit splitting (rad/s)
  double gammaP = 0;   ///< intermediate-state decay (rad/s)
  double gammaR = 0;   ///< Rydberg decay (rad/s)
  double mass = 0;     ///< atomic mass (kg)
  AtomScheme6 scheme6; ///< six-level base (model == SixLevel only)
  BlockadeSpec blockadePair6 = BlockadeSpec::scalar(0); ///< six-level shifts

  int nShots = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  Method method = Method::Expm;
  int rk4Divisor = 40;
  double prepTarget = 0.98;    ///< initial weight on the intended qubit state
  double prepReservoir = 0.02; ///< weight parked in |g> (dark, counted lost)
  double backgroundLossTwoAtom = 0.19; ///< post-hoc scaling, not a channel
  double tGap = 500e-9;        ///< switching gap between pulses (s)
  /// Zero noise, zero decay, and a huge-blockade surrogate: the only error
  /// left is the imperfect state preparation.
  bool ideal = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Gate model assembled from the configuration: the 5-level base couples the
/// nominal beams and atomic constants, with gamma01 derived from the
/// magnetic and trap models; the 6-level base is embedded as-is.
GateModel gate_model(const ExperimentConfig& cfg);

/// The calibrated controlled-Z core for this configuration: standard
/// sequence with the configured gap, plus the single-qubit Z corrections
/// measured on the decay-free nominal reference.
PulseSequence calibrated_core(const ExperimentConfig& cfg,
                              const GateModel& gate);

struct TruthTableResult {
  RMatrix table;                     ///< 4x4 input -> output probabilities
  RMatrix tableStderr;               ///< per-entry shot-to-shot standard error
  double fidelityRaw = 0;            ///< loss-corrected x (1 - background)
  double fidelityLossCorrected = 0;  ///< unnormalized rows
  double fidelityTraceCorrected = 0; ///< row-normalized table
  double stderrLoss = 0;             ///< shot-to-shot, loss-corrected F
  double meanTraceLoss = 0;          ///< 1 - mean row sum
};

/// CNOT probability truth table averaged over nShots noise realizations.
TruthTableResult truth_table(const ExperimentConfig& cfg);

struct BellResult {
  double fidelityCorrected = 0; ///< <B1|rho|B1> / Tr[rho], shot-averaged
  double fidelityRaw = 0;       ///< corrected x (1 - background)
  double stderrCorrected = 0;
};

/// Bell-state preparation: control (|0> + i|1>)/sqrt2, target |1>, CNOT,
/// fidelity against (|00> + |11>)/sqrt2.
BellResult bell_experiment(const ExperimentConfig& cfg);

enum class SweepParam { Blockade, Omega, Tau };

struct SweepPoint {
  double value = 0;    ///< the swept parameter (rad/s or s)
  double eNumeric = 0; ///< 1 - mean diagonal survival of the pulsed gate
  double eTau = 0;     ///< closed-form decay term at the same parameters
  double eB = 0;       ///< closed-form blockade-phase term
};

/// Intrinsic-error sweep: no technical noise, no intermediate-state decay,
/// deeply detuned balanced legs, zero gap. One parameter runs over the grid
/// while the two others stay at their base values (two-photon Rabi from the
/// beams, blockade at nominal separation, tau = 1/gammaR).
std::vector<SweepPoint> intrinsic_sweep(SweepParam param,
                                        const std::vector<double>& grid,
                                        const ExperimentConfig& base);

/// Sample mean and standard error (sqrt of the population variance over N).
/// Throws std::invalid_argument for fewer than two values.
std::pair<double, double> monte_carlo_stats(const std::vector<double>& values);

} // namespace rydsim
