#pragma once

// Registry of Rydberg-state parameter sets (level gaps, lifetimes, blockade
// shifts, dimensionless ratios) loaded from a versioned JSON data file, plus
// the wiring that turns a registry entry into a 6-level atom scheme and its
// 3x3 Rydberg-pair blockade matrix.
//
// Data file resolution order: explicit load_from(), $RYDSIM_DATA_DIR, then
// the compiled-in source-tree default.

#include <string>
#include <vector>

#include "rydsim/analytic.hpp"
#include "rydsim/atoms.hpp"

namespace rydsim::registry {

enum class Species { Rb87, Cs };
enum class Orbital { P, D, S };

struct RydbergStateParams {
  std::string label;          ///< e.g. "76p3/2"
  Species species = Species::Rb87;
  Orbital orbital = Orbital::P;

  // Dimensional parameters, converted on load (all angular frequencies rad/s).
  double omega10 = 0;         ///< qubit splitting
  double omegaN1 = 0;         ///< gap to the n-1 Rydberg level
  double omegaN2 = 0;         ///< gap to the n-2 Rydberg level (p/d)
  double omegaPrimeN1 = 0;    ///< signed gap to the upper d channel (s states)
  double omegaPrimeN2 = 0;    ///< gap to the lower d channel (s states)
  double tau = 0;             ///< Rydberg lifetime, s
  double separation = 0;      ///< atom separation d, m
  double bnn = 0;             ///< pair blockade shift Bnn, rad/s

  // Dimensionless ratios as quoted; validated against the dimensional values.
  double a = 0;               ///< omegaN1/omega10
  double aPrime = 0;          ///< omegaPrimeN1/omega10 (s states, signed)
  double aPP = 0;             ///< omegaPrimeN2/omega10 (s states)
  double b = 0;               ///< bnn/omega10
  double bPrime = 0;          ///< B_{n,n-1}/Bnn
  double bDoublePrime = 0;    ///< B_{n,n-2}/Bnn (p/d) or B'_{n,n-1}/Bnn (s)
  double bTriplePrime = 0;    ///< B'_{n,n-2}/Bnn (s states)
  double cPrime = 1.0;        ///< Omega'/Omega (1.31 for s states)

  double quotedRabi = 0;      ///< reference operating Rabi frequency, rad/s
  double referenceEcb = 0;    ///< reference minimum computational-basis error
  std::string notes;

  /// Off-resonant excitation error at x = Omega/omega10 using the
  /// class-appropriate closed form (low-n p / high-n p / d / s).
  double blockade_error(double x) const;

  /// Quadratic coefficient mu = E_B/x^2 entering the optimum-search budget
  /// E = 7*pi/(4*Omega*tau) + (mu/omega10^2)*Omega^2. For p states this uses
  /// the single-neighbour excitation sum (which the reference optima follow)
  /// rather than the class form of blockade_error().
  double cb_mu() const;
  double e_b0() const { return cb_mu() / (omega10 * omega10); }
  analytic::CbOptimum cb_optimum() const { return analytic::e_cb(e_b0(), tau); }

  analytic::SStateParams s_params() const;  ///< throws unless s-state

  /// Rydberg decay branching to {|0>, |g>, |1>} for this species.
  std::array<double, 3> ground_branching() const;
};

/// All registry states in file order. Loads the default file on first use.
const std::vector<RydbergStateParams>& all_states();

/// Look up by label; throws std::invalid_argument listing known labels.
const RydbergStateParams& find_state(const std::string& label);

std::vector<std::string> known_labels();

/// Load (or re-load) the registry from an explicit JSON file; throws
/// std::runtime_error naming the file/field on parse or validation errors.
void load_from(const std::string& path);

/// Directory the default registry file is read from.
std::string data_dir();

/// Six-level scheme for a registry state driven at two-photon Rabi frequency
/// omega: |r1>, |r2> are the neighbouring levels of the state's class, with
/// coupling ratios {1, 1, 1} (p/d) or {1, 1, cPrime} (s).
AtomScheme6 scheme6_for(const RydbergStateParams& st, double omega);

/// 3x3 blockade matrix over the Rydberg sub-basis {r2, r1, r}: diagonal and
/// unlisted pairs default to Bnn; listed cross shifts are the scaled b', b'',
/// b''' values.
BlockadeSpec blockade3_for(const RydbergStateParams& st);

}  // namespace rydsim::registry
