#pragma once

// Technical-noise model: thermal atom motion in the optical-tweezer traps,
// excitation-beam spatial profiles and intensity noise, magnetic-field and
// Doppler dephasing, and the interatomic blockade-shift models.
//
// Geometry: the two traps sit on the z axis (beam propagation axis) separated
// by `separation`; each atom's position is sampled around its own trap centre,
// and only the *relative* coordinates enter beam amplitudes and blockade.

#include <string>
#include <vector>

#include "rydsim/rng.hpp"
#include "rydsim/types.hpp"

namespace rydsim {

/// Trap array parameters (SI units).
struct TrapParams {
  double lambdaF = 0;     ///< trap wavelength (m)
  double waistF = 0;      ///< trap beam waist (m)
  double depthOverKb = 0; ///< trap depth U0/kB (K)
  double separation = 0;  ///< trap-centre distance along z (m)
  double tempA = 0;       ///< atom temperature (K)
};

/// Two-photon excitation beams (SI units, angular frequencies).
struct BeamParams {
  double waistXR = 0, waistYR = 0;  ///< lower-leg beam waists (m)
  double waistXB = 0, waistYB = 0;  ///< upper-leg beam waists (m)
  double lambdaR = 0, lambdaB = 0;  ///< wavelengths (m)
  double rabiR0 = 0, rabiB0 = 0;    ///< peak Rabi couplings (rad/s)
  double deltaP = 0;                ///< intermediate-state detuning (rad/s)
  double deltaAC0 = 0;              ///< residual two-photon detuning offset (rad/s)
  double powerFluctR = 0;           ///< fractional FWHM of the lower-leg power
  double powerFluctB = 0;           ///< fractional FWHM of the upper-leg power
  /// If true (default), the laser is assumed tuned to two-photon resonance at
  /// trap centre and nominal power: the fixed compensation equals the nominal
  /// differential Stark shift, so zero noise means zero effective detuning and
  /// weaker-than-nominal beams leave a positive residual.
  bool compensateStark = true;
};

/// Magnetic environment and the g-factors of the states involved.
struct MagneticModel {
  double biasBz = 0;   ///< bias field (T)
  double sigmaB = 0;   ///< rms field fluctuation (T)
  double gRyd = 1.2;   ///< Rydberg-state g-factor
  double mRyd = 2.5;   ///< Rydberg-state magnetic quantum number
  double gGround = 0.5;///< qubit-|1> g-factor
  double mGround = 0;  ///< qubit-|1> magnetic quantum number
  double gS = 2.0023193043622;   ///< electron g (clock-shift formula)
  double gI = -0.0009951414;     ///< nuclear g (clock-shift formula)
};

/// Interatomic blockade-shift model (all shifts in rad/s).
struct BlockadeModel {
  enum class Kind { Constant, Tabulated, VdW };
  Kind kind = Kind::Constant;
  double separation = 0;            ///< nominal trap separation (m)
  double b0 = 0;                    ///< Constant: the shift
  std::vector<double> sepUm;        ///< Tabulated: separations (um, increasing)
  std::vector<double> shiftRad;     ///< Tabulated: shifts (rad/s)
  double c6 = 0;                    ///< VdW: C6 coefficient (rad/s * m^6)
};

/// One Monte Carlo realization of the technical noise.
struct Shot {
  Vec3 posC = Vec3::Zero(), posT = Vec3::Zero();  ///< offsets from trap centres (m)
  Vec3 velC = Vec3::Zero(), velT = Vec3::Zero();  ///< velocities (m/s)
  double dB = 0;                ///< magnetic-field deviation (T)
  double powR = 1, powB = 1;    ///< laser power factors (dimensionless)
  cplx omegaRC{0, 0}, omegaBC{0, 0};  ///< sampled Rabi couplings, control
  cplx omegaRT{0, 0}, omegaBT{0, 0};  ///< sampled Rabi couplings, target
  double deltaRC = 0, deltaRT = 0;    ///< effective two-photon detunings (rad/s)
  double gammaPhC = 0, gammaPhT = 0;  ///< Rydberg dephasing rates (rad/s)
  double blockade = 0;                ///< interatomic shift this shot (rad/s)
};

enum class Beam { Red, Blue };

/// Thermal position variances {sx^2, sy^2, sz^2} (m^2) in a Gaussian-beam trap.
std::array<double, 3> position_variances(const TrapParams& trap);

/// Thermal velocity variance per axis (m^2/s^2).
double velocity_variance(const TrapParams& trap, double mass);

/// Rabi coupling at position r for the given beam, including the Gaussian
/// transverse envelope with z-dependent waists, the axial amplitude falloff,
/// and the square root of the power factor.
cplx rabi_at(const BeamParams& beams, const Vec3& r, Beam which, double powerFactor);

/// Differential two-photon Stark shift at position r (rad/s), power-scaled:
/// deltaAC0 + [|OmegaR(r)|^2 - |OmegaB(r)|^2] / (4 |deltaP|).
double stark_at_position(const BeamParams& beams, const Vec3& r, double powR,
                         double powB);

/// Stark shifts for control and target atoms.
std::pair<double, double> stark_at(const BeamParams& beams, const Vec3& rC,
                                   const Vec3& rT, double powR, double powB);

/// Two-photon Doppler shift for counter-propagating beams along z:
/// (kR - kB) * v_z with kR, kB the wavenumber magnitudes (rad/s).
double doppler_detuning(const Vec3& v, double kR, double kB);

/// Differential Rydberg Zeeman slope (gRyd mRyd - gGround mGround) muB / hbar
/// (rad/s per tesla).
double zeeman_slope(const MagneticModel& mag);

/// Rydberg dephasing rate sqrt(gammaB^2 + gammaD^2) for a given field
/// deviation and quasi-static Doppler detuning.
double gamma_ph(const MagneticModel& mag, double dB, double deltaD);

/// Qubit dephasing rate: quadrature sum of the second-order Zeeman (clock)
/// shift fluctuation at the bias field and the trap-induced differential
/// light-shift broadening. Constant for a given configuration.
double gamma_01(const MagneticModel& mag, const TrapParams& trap, double omega10);

/// Blockade model constructors.
BlockadeModel constant_blockade(double b0, double separation);
/// Two-column text file "separation_um shift_MHz", '#' comments allowed,
/// separations strictly increasing. Throws std::runtime_error on bad input.
BlockadeModel tabulated_blockade_from_file(const std::string& path, double separation);
/// Van der Waals model B = C6 / (d^2 + dz^2)^3 with C6 calibrated such that
/// the gate-error-weighted thermal average of the blockade distribution
/// equals bbarTarget: E1(Bbar) = <E1(B(dz))> over dz ~ N(0, 2 sz^2).
BlockadeModel vdw_blockade_calibrated(const TrapParams& trap, double bbarTarget,
                                      double omega, double tau, double omega10);

/// Shift at relative axial offset dz = z_target - z_control (rad/s).
double blockade_at(const BlockadeModel& model, double dz);

/// Effective blockade of the calibrated/thermal distribution: the value Bbar
/// solving E1(Bbar) = <E1(B(dz))> for the given trap and gate parameters.
double effective_blockade(const BlockadeModel& model, const TrapParams& trap,
                          double omega, double tau, double omega10);

/// Draw one noise realization. Draw order is fixed (posC, posT, velC, velT,
/// dB, powR, powB) so a given seed always produces the same shot.
Shot sample_shot(const TrapParams& trap, const BeamParams& beams,
                 const MagneticModel& mag, const BlockadeModel& blockade,
                 double mass, NoiseRng& rng);

/// The zero-noise realization (trap centres, zero velocity, nominal power).
Shot ideal_shot(const BeamParams& beams, const BlockadeModel& blockade);

} // namespace rydsim
