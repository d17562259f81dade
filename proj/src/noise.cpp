#include "rydsim/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rydsim/analytic.hpp"
#include "rydsim/constants.hpp"

namespace rydsim {

using consts::pi;
using consts::two_pi;

std::array<double, 3> position_variances(const TrapParams& trap) {
  if (trap.depthOverKb <= 0 || trap.tempA < 0 || trap.waistF <= 0 || trap.lambdaF <= 0)
    throw std::invalid_argument("position_variances: invalid trap parameters");
  const double ratio = trap.tempA / trap.depthOverKb;  // kB T / U0
  const double w2 = trap.waistF * trap.waistF;
  const double sxy2 = w2 / 4.0 * ratio;
  const double sz2 =
      pi * pi * w2 * w2 / (2.0 * trap.lambdaF * trap.lambdaF) * ratio;
  return {sxy2, sxy2, sz2};
}

double velocity_variance(const TrapParams& trap, double mass) {
  if (mass <= 0) throw std::invalid_argument("velocity_variance: mass must be > 0");
  return consts::kB * trap.tempA / mass;
}

namespace {

double envelope(double wx, double wy, double lambda, const Vec3& r) {
  // Gaussian beam along z: waists grow as w^2 (1 + z^2/L^2) with the
  // Rayleigh-like scale L = pi w^2 / lambda, and the on-axis amplitude falls
  // as [(1 + z^2/Lx^2)(1 + z^2/Ly^2)]^{-1/4}.
  const double lx = pi * wx * wx / lambda;
  const double ly = pi * wy * wy / lambda;
  const double gx = 1.0 + r.z() * r.z() / (lx * lx);
  const double gy = 1.0 + r.z() * r.z() / (ly * ly);
  const double wx2 = wx * wx * gx;
  const double wy2 = wy * wy * gy;
  return std::exp(-r.x() * r.x() / wx2 - r.y() * r.y() / wy2) /
         std::pow(gx * gy, 0.25);
}

} // namespace

cplx rabi_at(const BeamParams& beams, const Vec3& r, Beam which, double powerFactor) {
  if (powerFactor < 0) throw std::invalid_argument("rabi_at: negative power factor");
  const double sq = std::sqrt(powerFactor);
  if (which == Beam::Red)
    return beams.rabiR0 * envelope(beams.waistXR, beams.waistYR, beams.lambdaR, r) * sq;
  return beams.rabiB0 * envelope(beams.waistXB, beams.waistYB, beams.lambdaB, r) * sq;
}

double stark_at_position(const BeamParams& beams, const Vec3& r, double powR,
                         double powB) {
  if (beams.deltaP == 0)
    throw std::invalid_argument("stark_at_position: deltaP must be nonzero");
  const double oR = std::abs(rabi_at(beams, r, Beam::Red, powR));
  const double oB = std::abs(rabi_at(beams, r, Beam::Blue, powB));
  return beams.deltaAC0 + (oR * oR - oB * oB) / (4.0 * std::abs(beams.deltaP));
}

std::pair<double, double> stark_at(const BeamParams& beams, const Vec3& rC,
                                   const Vec3& rT, double powR, double powB) {
  return {stark_at_position(beams, rC, powR, powB),
          stark_at_position(beams, rT, powR, powB)};
}

double doppler_detuning(const Vec3& v, double kR, double kB) {
  return (kR - kB) * v.z();
}

double zeeman_slope(const MagneticModel& mag) {
  return (mag.gRyd * mag.mRyd - mag.gGround * mag.mGround) * consts::muB /
         consts::hbar;
}

double gamma_ph(const MagneticModel& mag, double dB, double deltaD) {
  const double gB = zeeman_slope(mag) * std::abs(dB);
  const double gD = std::abs(deltaD);
  return std::hypot(gB, gD);
}

namespace {

// Ground hyperfine splitting vs field (second-order Zeeman / clock shift).
double omega10_of_field(const MagneticModel& mag, double omega10, double B) {
  const double x = (mag.gS - mag.gI) * consts::muB * B / (consts::hbar * omega10);
  return omega10 * std::sqrt(1.0 + x * x);
}

} // namespace

double gamma_01(const MagneticModel& mag, const TrapParams& trap, double omega10) {
  const double gB = omega10_of_field(mag, omega10, mag.biasBz + mag.sigmaB) -
                    omega10_of_field(mag, omega10, mag.biasBz);
  // Differential light shift of the qubit pair: ~1.5 kHz per mK of trap
  // depth, broadened thermally; the 1.03 factor matches the measured thermal
  // line-shape width.
  const double delta0 = two_pi * 1.5e3 * (trap.depthOverKb / 1.0e-3);
  const double gT = 1.03 * delta0 * trap.tempA / (2.0 * trap.depthOverKb);
  return std::hypot(gB, gT);
}

BlockadeModel constant_blockade(double b0, double separation) {
  BlockadeModel m;
  m.kind = BlockadeModel::Kind::Constant;
  m.b0 = b0;
  m.separation = separation;
  return m;
}

BlockadeModel tabulated_blockade_from_file(const std::string& path, double separation) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("blockade table: cannot open " + path);
  BlockadeModel m;
  m.kind = BlockadeModel::Kind::Tabulated;
  m.separation = separation;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double s, bMHz;
    if (!(ls >> s)) continue;  // blank or comment-only line
    if (!(ls >> bMHz))
      throw std::runtime_error("blockade table: missing shift column at line " +
                               std::to_string(lineno));
    double extra;
    if (ls >> extra)
      throw std::runtime_error("blockade table: extra column at line " +
                               std::to_string(lineno));
    if (!m.sepUm.empty() && s <= m.sepUm.back())
      throw std::runtime_error(
          "blockade table: separations must be strictly increasing at line " +
          std::to_string(lineno));
    m.sepUm.push_back(s);
    m.shiftRad.push_back(bMHz * consts::MHz);
  }
  if (m.sepUm.size() < 2)
    throw std::runtime_error("blockade table: need at least two rows in " + path);
  return m;
}

double blockade_at(const BlockadeModel& model, double dz) {
  switch (model.kind) {
    case BlockadeModel::Kind::Constant:
      return model.b0;
    case BlockadeModel::Kind::Tabulated: {
      const double sUm = std::abs(model.separation + dz) / consts::um;
      const auto& xs = model.sepUm;
      const auto& ys = model.shiftRad;
      if (sUm <= xs.front()) return ys.front();
      if (sUm >= xs.back()) return ys.back();
      std::size_t hi = 1;
      while (xs[hi] < sUm) ++hi;
      const double t = (sUm - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
      return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
    }
    case BlockadeModel::Kind::VdW: {
      const double r2 = model.separation * model.separation + dz * dz;
      return model.c6 / (r2 * r2 * r2);
    }
  }
  throw std::logic_error("blockade_at: unknown model kind");
}

namespace {

// Gauss-Hermite nodes/weights for integrals of f(x) exp(-x^2).
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    for (int it = 0; it < 200; ++it) {
      double p1 = 0.7511255444649425;  // pi^{-1/4}
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(j / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
}

constexpr int kQuadNodes = 41;

// Mean of g(dz) over dz ~ N(0, sigma^2).
template <typename F>
double gaussian_mean(double sigma, F&& g) {
  std::vector<double> x, w;
  gauss_hermite(kQuadNodes, x, w);
  double s = 0.0;
  for (int i = 0; i < kQuadNodes; ++i)
    s += w[i] * g(std::sqrt(2.0) * sigma * x[i]);
  return s / std::sqrt(pi);
}

double relative_sigma_z(const TrapParams& trap) {
  const auto var = position_variances(trap);
  return std::sqrt(2.0 * var[2]);  // difference of two independent offsets
}

double bbar_of_model(const BlockadeModel& model, double sigmaRel, double omega,
                     double tau, double omega10) {
  const double avg = gaussian_mean(sigmaRel, [&](double dz) {
    return analytic::e1(omega, tau, blockade_at(model, dz), omega10);
  });
  // e1 is strictly decreasing in B; invert by bisection on log B.
  double lo = std::log(two_pi * 1.0e2), hi = std::log(two_pi * 1.0e13);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (analytic::e1(omega, tau, std::exp(mid), omega10) > avg)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

} // namespace

BlockadeModel vdw_blockade_calibrated(const TrapParams& trap, double bbarTarget,
                                      double omega, double tau, double omega10) {
  if (bbarTarget <= 0)
    throw std::invalid_argument("vdw_blockade_calibrated: target must be > 0");
  const double sigmaRel = relative_sigma_z(trap);
  const double d = trap.separation;
  BlockadeModel m;
  m.kind = BlockadeModel::Kind::VdW;
  m.separation = d;
  // Bbar(C6) is strictly increasing; bracket and bisect on log C6.
  const double d6 = std::pow(d, 6);
  double lo = std::log(bbarTarget * d6 * 1e-2);
  double hi = std::log(bbarTarget * d6 * 1e8);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    m.c6 = std::exp(mid);
    if (bbar_of_model(m, sigmaRel, omega, tau, omega10) < bbarTarget)
      lo = mid;
    else
      hi = mid;
  }
  m.c6 = std::exp(0.5 * (lo + hi));
  return m;
}

double effective_blockade(const BlockadeModel& model, const TrapParams& trap,
                          double omega, double tau, double omega10) {
  return bbar_of_model(model, relative_sigma_z(trap), omega, tau, omega10);
}

Shot sample_shot(const TrapParams& trap, const BeamParams& beams,
                 const MagneticModel& mag, const BlockadeModel& blockade,
                 double mass, NoiseRng& rng) {
  const auto pv = position_variances(trap);
  const double sx = std::sqrt(pv[0]), sy = std::sqrt(pv[1]), sz = std::sqrt(pv[2]);
  const double sv = std::sqrt(velocity_variance(trap, mass));

  Shot s;
  s.posC = Vec3(rng.normal(0, sx), rng.normal(0, sy), rng.normal(0, sz));
  s.posT = Vec3(rng.normal(0, sx), rng.normal(0, sy), rng.normal(0, sz));
  s.velC = Vec3(rng.normal(0, sv), rng.normal(0, sv), rng.normal(0, sv));
  s.velT = Vec3(rng.normal(0, sv), rng.normal(0, sv), rng.normal(0, sv));
  s.dB = rng.normal(0, mag.sigmaB);
  const double fwhmToSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));
  s.powR = beams.powerFluctR > 0
               ? rng.truncated_normal_positive(1.0, beams.powerFluctR / fwhmToSigma)
               : 1.0;
  s.powB = beams.powerFluctB > 0
               ? rng.truncated_normal_positive(1.0, beams.powerFluctB / fwhmToSigma)
               : 1.0;

  s.omegaRC = rabi_at(beams, s.posC, Beam::Red, s.powR);
  s.omegaBC = rabi_at(beams, s.posC, Beam::Blue, s.powB);
  s.omegaRT = rabi_at(beams, s.posT, Beam::Red, s.powR);
  s.omegaBT = rabi_at(beams, s.posT, Beam::Blue, s.powB);

  const double kR = two_pi / beams.lambdaR;
  const double kB = two_pi / beams.lambdaB;
  const double dopC = doppler_detuning(s.velC, kR, kB);
  const double dopT = doppler_detuning(s.velT, kR, kB);
  const double deltaB = zeeman_slope(mag) * s.dB;
  // The laser frequencies are fixed: with compensation enabled they sit on the
  // effective two-photon resonance at trap centre and nominal power, i.e. the
  // bare laser detuning equals the nominal beam-induced Stark shift. The
  // sampled deltaR is the *effective* detuning this shot: bare laser detuning
  // minus the local beam shift (an off-centre atom sees weaker beams, so the
  // fixed compensation overshoots and the effective detuning goes positive),
  // plus the deliberate offset and the Zeeman/Doppler contributions.
  const double beamNom =
      stark_at_position(beams, Vec3::Zero(), 1.0, 1.0) - beams.deltaAC0;
  const double bare = beams.compensateStark ? beamNom : 0.0;
  const double beamC =
      stark_at_position(beams, s.posC, s.powR, s.powB) - beams.deltaAC0;
  const double beamT =
      stark_at_position(beams, s.posT, s.powR, s.powB) - beams.deltaAC0;
  s.deltaRC = bare - beamC + beams.deltaAC0 + deltaB + dopC;
  s.deltaRT = bare - beamT + beams.deltaAC0 + deltaB + dopT;
  s.gammaPhC = gamma_ph(mag, s.dB, dopC);
  s.gammaPhT = gamma_ph(mag, s.dB, dopT);
  s.blockade = blockade_at(blockade, s.posT.z() - s.posC.z());
  return s;
}

Shot ideal_shot(const BeamParams& beams, const BlockadeModel& blockade) {
  Shot s;
  s.omegaRC = s.omegaRT = beams.rabiR0;
  s.omegaBC = s.omegaBT = beams.rabiB0;
  s.deltaRC = s.deltaRT =
      beams.compensateStark
          ? beams.deltaAC0
          : beams.deltaAC0 -
                (beams.rabiR0 != 0.0 || beams.rabiB0 != 0.0
                     ? stark_at_position(beams, Vec3::Zero(), 1.0, 1.0) -
                           beams.deltaAC0
                     : 0.0);
  s.blockade = blockade_at(blockade, 0.0);
  return s;
}

} // namespace rydsim
