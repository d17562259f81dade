#pragma once

// Closed-form error estimates for the blockade C_Z gate.
//
// Intrinsic-gate family: E1 (decay + rotation + blockade phase error averaged
// over the computational basis), its optimum Rabi frequency and minimum, the
// E2 variant that keeps the uncompensated blockade phase, and the intermediate
// state spontaneous-emission estimate.
//
// Blockade-leakage family: off-resonant Rydberg-excitation errors in
// dimensionless form (x = Omega/omega10, a-type level-gap ratios, b-type
// scaled blockade shifts), for the three level-structure classes:
//   * p-type, low n (single neighbouring level below, gap > omega10),
//   * p-type, high n (two neighbouring levels straddling omega10),
//   * s-type (extra d-character channel with coupling Omega' = cPrime*Omega).
// E_B is quadratic in x, so E_B = eB0 * Omega^2 with eB0 = E_B(x=1)/omega10^2;
// e_cb() turns that coefficient plus the Rydberg lifetime into the optimal
// Rabi frequency and the minimum computational-basis error.
//
// All frequencies/rates are angular (rad/s); returned errors dimensionless.

namespace rydsim::analytic {

/// Averaged intrinsic gate error at Rabi frequency omega, Rydberg lifetime
/// tau (gammaR = 1/tau), blockade shift B, qubit splitting omega10.
double e1(double omega, double tau, double blockade, double omega10);

/// The two contributions separately (e1 = decay + phase): Rydberg decay over
/// the sequence, and the uncancelled blockade phase spread.
double e1_decay_term(double omega, double tau, double blockade, double omega10);
double e1_phase_term(double omega, double blockade, double omega10);

/// Rabi frequency minimizing e1 in the omega10 >> B limit, and the minimum.
double omega1_opt(double blockade, double tau);
double e1_min(double blockade, double tau);

/// e1 plus the uncompensated blockade phase error pi*Omega/8B.
double e2(double omega, double tau, double blockade, double omega10);
double omega2_opt(double blockade, double tau);
double e2_min(double blockade, double tau);

/// Intermediate-state spontaneous-emission probability for a pi-2pi-pi
/// sequence with legs omegaR, omegaB, intermediate decay gammaP, detuning
/// deltaP (nonzero).
double p_se(double omegaR, double omegaB, double gammaP, double deltaP);

/// Low-n p-type blockade error (a = omega_{n,n-1}/omega10 > 1,
/// b = Bnn/omega10, bPrime = B_{n,n-1}/Bnn, x = Omega/omega10).
/// This variant carries the doubled single-atom weights that reproduce the
/// reference values (0.63e-4 / 0.66e-4 at x = 0.005); the _literal variant
/// below keeps the 3/2 prefactor of the underlying excitation sum and is the
/// cPrime -> 0 limit of blockade_error_s.
double blockade_error_p_low(double a, double b, double bPrime, double x);
double blockade_error_p_low_literal(double a, double b, double bPrime, double x);

/// High-n p-type blockade error; aRatio2 = omega_{n,n-2}/omega10 with
/// aRatio2 > 1 > a, bDoublePrime = B_{n,n-2}/Bnn.
double blockade_error_p_high(double a, double aRatio2, double b, double bPrime,
                             double bDoublePrime, double x);

/// s-type parameters: a = omega_{n,n-1}/omega10 (s-s gap), aPP the scaled
/// d-channel gap omega'_{n,n-2}/omega10, bTriplePrime = B'_{n,n-2}/Bnn,
/// cPrime = Omega'/Omega.
struct SStateParams {
  double a = 0;
  double aPP = 0;
  double b = 0;
  double bPrime = 0;
  double bTriplePrime = 0;
  double cPrime = 0;
};

/// s-type blockade error; with cPrime = 0 and aPP -> infinity this equals
/// blockade_error_p_low_literal(a, b, bPrime, x) exactly.
double blockade_error_s(const SStateParams& p, double x);

/// Optimal Rabi frequency and minimum computational-basis error for a decay
/// plus-blockade-leakage budget E = 7*pi/(4*Omega*tau) + eB0*Omega^2.
struct CbOptimum {
  double omegaOpt = 0;  ///< rad/s
  double eCb = 0;
};
CbOptimum e_cb(double eB0, double tau);

/// Upper bound on the double-excitation probability from the photon-momentum
/// kick, eta the Lamb-Dicke-type suppression factor.
double momentum_kick_bound(double eta, double omega, double blockade);

}  // namespace rydsim::analytic
