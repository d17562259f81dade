#pragma once

// Simulated two-qubit quantum process tomography.
//
// A channel is expanded as rho_out = sum_mn chi_mn E_m rho_in E_n^dagger over
// the fixed two-qubit Pauli basis E_{4i+j} = sigma_i (x) sigma_j with
// sigma = {I, X, Y, Z}. The basis satisfies Tr[E_m^dagger E_n] = 4 delta_mn;
// coefficients of a unitary are c_m = Tr[E_m^dagger U] / 4, which makes
// chi = c c^dagger and Tr chi = 1 for any unitary channel. Trace-decreasing
// channels have Tr chi < 1, so lost population registers as process error.

#include <array>

#include "rydsim/evolve.hpp"
#include "rydsim/noise.hpp"
#include "rydsim/types.hpp"

namespace rydsim {

/// Process matrix in the fixed Pauli basis.
struct ChiMatrix {
  CMatrix entries;        ///< 16 x 16, Hermitian
  bool physical = false;  ///< PSD (min eigenvalue >= -1e-10) and Tr <= 1 + 1e-9
  double residual = 0.0;  ///< final least-squares objective (chi_mle only)
  long iterations = 0;    ///< gradient steps taken (chi_mle only)
};

/// The 16 two-qubit Pauli operators E_{4i+j} = sigma_i (x) sigma_j.
const std::array<CMatrix, 16>& pauli_basis();

/// Tomographic input set: all 16 products of the per-qubit pure states
/// {|0>, |1>, (|0>+|1>)/sqrt2, (|0>+i|1>)/sqrt2}. Informationally complete:
/// the vectorized inputs span the two-qubit operator space.
std::array<CMatrix, 16> input_states();

/// Result of pushing the 16 tomographic inputs through a channel.
struct ChannelOutputs {
  std::array<CMatrix, 16> rho;        ///< projected 4x4 outputs (unnormalized)
  std::array<double, 16> traceLoss;   ///< 1 - Tr[rho] per input
};

/// Embed each tomographic input in the full two-atom basis, run the sequence,
/// and project back onto the computational block. The first input runs
/// serially to fill the propagator cache; the remaining fifteen are
/// distributed over `threads` workers (they only read the cache, so results
/// are identical for any thread count).
ChannelOutputs simulate_channel(const PulseSequence& seq, const Shot& shot,
                                const GateModel& gate,
                                Method method = Method::Expm,
                                PropagatorCache* cache = nullptr,
                                int threads = 1);

/// Apply a 4x4 unitary directly (no dynamics): outputs are U rho U^dagger.
ChannelOutputs apply_unitary_channel(const CMatrix& u);

/// Exact (non-iterative) inversion of the linear map chi -> outputs. The
/// result reproduces the data but may be unphysical (negative eigenvalues,
/// trace above 1). Throws std::runtime_error on a singular design matrix.
ChiMatrix chi_linear_inversion(const std::array<CMatrix, 16>& inputs,
                               const std::array<CMatrix, 16>& outputs);

/// Maximum-likelihood physicalization: chi = T^dagger T with complex
/// lower-triangular T (real diagonal; 256 real parameters), minimizing the
/// summed squared Frobenius deviation of the predicted outputs subject to
/// Tr chi <= 1 (quadratic penalty plus a final projection). Seeded from the
/// eigenvalue-clamped linear-inversion chi; stops when the gradient norm
/// drops below 1e-10 or after 1e5 iterations (best iterate, residual kept).
ChiMatrix chi_mle(const std::array<CMatrix, 16>& inputs,
                  const std::array<CMatrix, 16>& outputs);

/// Rank-1 process matrix of a unitary: chi = |c><c|, c_m = Tr[E_m^dagger U]/4.
/// Throws std::invalid_argument unless U is unitary to 1e-10.
ChiMatrix chi_ideal(const CMatrix& u);

/// The controlled-phase target in this library's convention:
/// diag(1, -1, -1, -1) on {|00>, |01>, |10>, |11>}.
CMatrix cz_unitary();

/// E_O = 1 - Tr^2[sqrt(sqrt(chi_sim) chi_id sqrt(chi_sim))].
double error_overlap(const ChiMatrix& chiId, const ChiMatrix& chiSim);

/// E_D = (1/2) Tr|chi_id - chi_sim| (half the trace norm of the difference).
double error_distance(const ChiMatrix& chiId, const ChiMatrix& chiSim);

/// Error-probability lower bounds implied by the two measures:
/// {E_O / 2, E_D}.
std::array<double, 2> epsilon_bounds(double eO, double eD);

/// Options for calibrate_phase.
struct CalibrationOptions {
  bool numeric = false;    ///< golden-section search instead of the closed form
  double tGap = 0.0;       ///< gap duration inside the scanned sequences
  bool zCalibrated = true; ///< wrap scanned sequences with single-qubit Z fixes
  Method method = Method::Expm;
  PropagatorCache* cache = nullptr;
};

/// Compensation phase for the phase-fixed controlled-Z sequence. The default
/// is the closed form phi = pi * Omega / (2 * B_rr) with B_rr the
/// Rydberg-pair shift of the driven level; the numeric mode scans phi over
/// [0, 2 pi Omega / B_rr] by golden section (tolerance 1e-4 rad), minimizing
/// E_D of the reconstructed process against the controlled-phase target.
double calibrate_phase(const GateModel& gate, const Shot& shot,
                       const CalibrationOptions& opts = {});

} // namespace rydsim
