#include "rydsim/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"

namespace rydsim::analytic {

namespace {
constexpr double kSevenPi = 7.0 * consts::pi;
inline double sq(double v) { return v * v; }
}  // namespace

double e1_decay_term(double omega, double tau, double blockade,
                     double omega10) {
  const double xw = sq(omega / omega10);
  const double xb = sq(omega / blockade);
  return kSevenPi / (4.0 * omega * tau) * (1.0 + xw + xb / 7.0);
}

double e1_phase_term(double omega, double blockade, double omega10) {
  const double xw = sq(omega / omega10);
  const double xb = sq(omega / blockade);
  return xb / 8.0 * (1.0 + 6.0 * xw);
}

double e1(double omega, double tau, double blockade, double omega10) {
  return e1_decay_term(omega, tau, blockade, omega10) +
         e1_phase_term(omega, blockade, omega10);
}

double omega1_opt(double blockade, double tau) {
  return std::cbrt(kSevenPi) * std::cbrt(sq(blockade) / tau);
}

double e1_min(double blockade, double tau) {
  return 3.0 / 8.0 * std::cbrt(sq(kSevenPi)) / std::cbrt(sq(blockade * tau));
}

double e2(double omega, double tau, double blockade, double omega10) {
  return e1(omega, tau, blockade, omega10) +
         consts::pi * omega / (8.0 * blockade);
}

double omega2_opt(double blockade, double tau) {
  return std::sqrt(14.0 * blockade / tau);
}

double e2_min(double blockade, double tau) {
  return std::sqrt(7.0) * consts::pi / (2.0 * std::sqrt(2.0)) /
         std::sqrt(blockade * tau);
}

double p_se(double omegaR, double omegaB, double gammaP, double deltaP) {
  if (deltaP == 0.0) throw std::invalid_argument("p_se: deltaP must be nonzero");
  if (omegaR == 0.0 || omegaB == 0.0)
    throw std::invalid_argument("p_se: Rabi frequencies must be nonzero");
  const double ratio = std::abs(omegaR / omegaB);
  return consts::pi * gammaP / (4.0 * std::abs(deltaP)) * (ratio + 1.0 / ratio);
}

double blockade_error_p_low(double a, double b, double bPrime, double x) {
  const double x2 = sq(x);
  const double e00 = 3.0 * x2 * (1.0 + 1.0 / sq(a - 1.0));
  const double e01 = 2.0 / 3.0 * e00;
  const double e10 =
      x2 / 2.0 * (1.0 / sq(a - b * bPrime - 1.0) + 1.0 / sq(1.0 + b));
  const double e11 = x2 / 2.0 * (1.0 / sq(b) + 1.0 / sq(a - b * bPrime));
  return (e00 + e01 + e10 + e11) / 4.0;
}

double blockade_error_p_low_literal(double a, double b, double bPrime,
                                    double x) {
  const double x2 = sq(x);
  const double e00 = 1.5 * x2 * (1.0 + 1.0 / sq(a - 1.0));
  const double e01 = 2.0 / 3.0 * e00;
  const double e10 =
      x2 / 2.0 * (1.0 / sq(a - b * bPrime - 1.0) + 1.0 / sq(1.0 + b));
  const double e11 = x2 / 2.0 * (1.0 / sq(b) + 1.0 / sq(a - b * bPrime));
  return (e00 + e01 + e10 + e11) / 4.0;
}

double blockade_error_p_high(double a, double aRatio2, double b, double bPrime,
                             double bDoublePrime, double x) {
  const double x2 = sq(x);
  const double e00 = 3.0 * x2 / sq(1.0 - a);
  const double e01 = 2.0 / 3.0 * e00;
  const double e10 = x2 / 2.0 *
                     (1.0 / sq(1.0 - a + b * bPrime) +
                      1.0 / sq(aRatio2 - 1.0 - b * bDoublePrime));
  const double e11 = x2 / 2.0 * (1.0 / sq(b) + 1.0 / sq(a - b * bPrime));
  return (e00 + e01 + e10 + e11) / 4.0;
}

double blockade_error_s(const SStateParams& p, double x) {
  const double x2 = sq(x);
  const double c2 = sq(p.cPrime);
  const double e00 = 1.5 * x2 *
                     (1.0 + c2 / sq(1.0 - p.aPP) + 1.0 / sq(p.a - 1.0));
  const double e01 = 2.0 / 3.0 * e00 + c2 * x2 / (2.0 * sq(p.aPP));
  const double e10 = c2 * x2 / sq(p.aPP) +
                     x2 / 2.0 *
                         (1.0 / sq(p.a - p.b * p.bPrime - 1.0) +
                          1.0 / sq(1.0 + p.b)) +
                     c2 * x2 / (2.0 * sq(1.0 - p.aPP + p.b * p.bTriplePrime));
  const double e11 = c2 * x2 / sq(p.aPP) +
                     x2 / 2.0 *
                         (1.0 / sq(p.b) + 1.0 / sq(p.a - p.b * p.bPrime)) +
                     c2 * x2 / (2.0 * sq(p.aPP - p.b * p.bTriplePrime));
  return (e00 + e01 + e10 + e11) / 4.0;
}

CbOptimum e_cb(double eB0, double tau) {
  if (eB0 <= 0 || tau <= 0)
    throw std::invalid_argument("e_cb: eB0 and tau must be positive");
  CbOptimum out;
  out.omegaOpt = std::cbrt(kSevenPi / (8.0 * eB0 * tau));
  out.eCb = 3.0 / 4.0 * std::cbrt(sq(kSevenPi)) * std::cbrt(eB0) /
            std::cbrt(sq(tau));
  return out;
}

double momentum_kick_bound(double eta, double omega, double blockade) {
  return sq(3.0 * consts::pi * eta * omega / (4.0 * blockade)) / 2.0;
}

}  // namespace rydsim::analytic
