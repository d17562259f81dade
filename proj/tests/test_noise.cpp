#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "rydsim/analytic.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/noise.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;
using consts::MHz;
using consts::pi;
using consts::two_pi;
using consts::uK;
using consts::um;

namespace {

TrapParams table_trap() {
  TrapParams t;
  t.lambdaF = 1.064e-6;
  t.waistF = 3.4e-6;
  t.depthOverKb = 4.5e-3;
  t.separation = 8.7e-6;
  t.tempA = 175e-6;
  return t;
}

BeamParams table_beams() {
  BeamParams b;
  b.waistXR = b.waistYR = 7.7e-6;
  b.waistXB = b.waistYB = 4.5e-6;
  b.lambdaR = 0.78e-6;
  b.lambdaB = 0.48e-6;
  b.rabiR0 = two_pi * 118e6;
  b.rabiB0 = two_pi * 39e6;
  b.deltaP = -two_pi * 2e9;
  b.deltaAC0 = 0;
  b.powerFluctR = 0.01;
  b.powerFluctB = 0.02;
  return b;
}

MagneticModel table_mag() {
  MagneticModel m;
  m.biasBz = 0.37e-3;
  m.sigmaB = 2.5e-6;
  return m;
}

std::string write_temp(const char* name, const char* text) {
  const std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
  return path;
}

}  // namespace

TEST_CASE("thermal position and velocity spreads") {
  const auto trap = table_trap();
  const auto var = position_variances(trap);
  CHECK(std::sqrt(var[0]) == doctest::Approx(0.33525 * um).epsilon(1e-4));
  CHECK(var[1] == var[0]);
  CHECK(std::sqrt(var[2]) == doctest::Approx(4.7595 * um).epsilon(1e-4));
  // variances are linear in temperature
  auto cold = trap;
  cold.tempA /= 4;
  CHECK(position_variances(cold)[2] == doctest::Approx(var[2] / 4));

  CHECK(std::sqrt(velocity_variance(trap, consts::massRb87)) ==
        doctest::Approx(0.12939).epsilon(1e-4));
  CHECK_THROWS_AS(velocity_variance(trap, 0.0), std::invalid_argument);
  auto bad = trap;
  bad.depthOverKb = 0;
  CHECK_THROWS_AS(position_variances(bad), std::invalid_argument);
}

TEST_CASE("beam envelope") {
  auto beams = table_beams();

  SUBCASE("nominal centre value") {
    CHECK(rabi_at(beams, Vec3::Zero(), Beam::Red, 1.0).real() ==
          doctest::Approx(two_pi * 118e6));
    CHECK(rabi_at(beams, Vec3::Zero(), Beam::Blue, 1.0).real() ==
          doctest::Approx(two_pi * 39e6));
  }
  SUBCASE("transverse falloff: one waist out gives 1/e") {
    const Vec3 r(beams.waistXR, 0, 0);
    CHECK(std::abs(rabi_at(beams, r, Beam::Red, 1.0)) ==
          doctest::Approx(two_pi * 118e6 / std::exp(1.0)));
  }
  SUBCASE("axial falloff: one Rayleigh length gives 1/sqrt(2)") {
    const double lx = pi * beams.waistXB * beams.waistXB / beams.lambdaB;
    const Vec3 r(0, 0, lx);
    CHECK(std::abs(rabi_at(beams, r, Beam::Blue, 1.0)) ==
          doctest::Approx(two_pi * 39e6 / std::sqrt(2.0)));
  }
  SUBCASE("defocused transverse width grows with z") {
    const double lx = pi * beams.waistXB * beams.waistXB / beams.lambdaB;
    // at z = lx the effective waist^2 doubles: offset x = waist gives
    // exp(-1/2) transverse factor on top of the 1/sqrt(2) axial one
    const Vec3 r(beams.waistXB, 0, lx);
    CHECK(std::abs(rabi_at(beams, r, Beam::Blue, 1.0)) ==
          doctest::Approx(two_pi * 39e6 * std::exp(-0.5) / std::sqrt(2.0)));
  }
  SUBCASE("power factor scales the amplitude by its square root") {
    CHECK(std::abs(rabi_at(beams, Vec3::Zero(), Beam::Red, 4.0)) ==
          doctest::Approx(2 * two_pi * 118e6));
    CHECK_THROWS_AS(rabi_at(beams, Vec3::Zero(), Beam::Red, -1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("differential Stark shift") {
  auto beams = table_beams();
  SUBCASE("nominal value at the centre") {
    CHECK(stark_at_position(beams, Vec3::Zero(), 1.0, 1.0) ==
          doctest::Approx(two_pi * 1.550375e6).epsilon(1e-9));
  }
  SUBCASE("offset adds through deltaAC0") {
    beams.deltaAC0 = two_pi * 1e5;
    CHECK(stark_at_position(beams, Vec3::Zero(), 1.0, 1.0) ==
          doctest::Approx(two_pi * (1.550375e6 + 1e5)).epsilon(1e-9));
  }
  SUBCASE("power scaling acts on each leg separately") {
    // doubling only the red power doubles the positive term
    const double s11 = stark_at_position(beams, Vec3::Zero(), 1.0, 1.0);
    const double s21 = stark_at_position(beams, Vec3::Zero(), 2.0, 1.0);
    const double oR2 = std::pow(two_pi * 118e6, 2), oB2 = std::pow(two_pi * 39e6, 2);
    CHECK(s21 - s11 == doctest::Approx(oR2 / (4 * two_pi * 2e9)).epsilon(1e-9));
    CHECK(s11 == doctest::Approx((oR2 - oB2) / (4 * two_pi * 2e9)).epsilon(1e-12));
  }
  SUBCASE("zero intermediate detuning rejected") {
    beams.deltaP = 0;
    CHECK_THROWS_AS(stark_at_position(beams, Vec3::Zero(), 1.0, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("Doppler and magnetic dephasing") {
  const auto beams = table_beams();
  const double kR = two_pi / beams.lambdaR, kB = two_pi / beams.lambdaB;

  SUBCASE("two-photon Doppler uses the wavenumber difference") {
    CHECK(doppler_detuning(Vec3(0, 0, 1.0), kR, kB) ==
          doctest::Approx(kR - kB));
    CHECK(kR - kB < 0);  // counter-propagating legs, blue leg stiffer
    // transverse motion does not contribute
    CHECK(doppler_detuning(Vec3(5.0, -3.0, 0), kR, kB) == 0.0);
    // thermal spread: |kR - kB| * sigma_v ~ 2pi x 104 kHz
    const double sv = std::sqrt(velocity_variance(table_trap(), consts::massRb87));
    CHECK(std::abs(kR - kB) * sv / two_pi ==
          doctest::Approx(103.7e3).epsilon(1e-3));
  }
  SUBCASE("Zeeman slope of the Rydberg transition") {
    MagneticModel mag;  // defaults: gRyd mRyd = 3, ground term zero
    CHECK(zeeman_slope(mag) ==
          doctest::Approx(3 * consts::muB / consts::hbar));
    CHECK(zeeman_slope(mag) == doctest::Approx(2.63823e11).epsilon(1e-4));
  }
  SUBCASE("quadrature combination") {
    MagneticModel mag;
    const double gB = zeeman_slope(mag) * 2.5e-6;
    CHECK(gamma_ph(mag, 2.5e-6, 0.0) == doctest::Approx(gB));
    CHECK(gamma_ph(mag, -2.5e-6, 0.0) == doctest::Approx(gB));
    CHECK(gamma_ph(mag, 0.0, -7e5) == doctest::Approx(7e5));
    CHECK(gamma_ph(mag, 2.5e-6, 7e5) ==
          doctest::Approx(std::hypot(gB, 7e5)));
  }
}

TEST_CASE("qubit dephasing rate") {
  const double w10 = two_pi * 6.83e9;
  auto trap = table_trap();
  auto mag = table_mag();

  SUBCASE("trap-induced part alone") {
    mag.sigmaB = 0;
    // delta0 = 2pi x 1.5 kHz per mK at 4.5 mK depth, thermally broadened
    CHECK(gamma_01(mag, trap, w10) == doctest::Approx(849.41).epsilon(1e-4));
  }
  SUBCASE("magnetic clock-shift part alone") {
    trap.tempA = 0;
    CHECK(gamma_01(mag, trap, w10) == doctest::Approx(671.3).epsilon(1e-3));
  }
  SUBCASE("combined in quadrature") {
    CHECK(gamma_01(mag, trap, w10) == doctest::Approx(1082.6).epsilon(1e-3));
  }
}

TEST_CASE("blockade models") {
  SUBCASE("constant") {
    const auto m = constant_blockade(two_pi * 20e6, 8.7 * um);
    CHECK(blockade_at(m, 0.0) == doctest::Approx(two_pi * 20e6));
    CHECK(blockade_at(m, 3 * um) == doctest::Approx(two_pi * 20e6));
  }

  SUBCASE("tabulated: interpolation") {
    const auto path = write_temp("rydsim_blockade_two_point.txt",
                                 "# separation_um  B_MHz\n"
                                 "0   20\n"
                                 "10  2\n");
    // with the nominal separation folded in at 0, an offset of 5 um lands
    // mid-table: 20 + (2-20)/2 = 11 MHz
    const auto m = tabulated_blockade_from_file(path, 0.0);
    CHECK(blockade_at(m, 5 * um) == doctest::Approx(two_pi * 11e6));
    CHECK(blockade_at(m, -5 * um) == doctest::Approx(two_pi * 11e6));
    CHECK(blockade_at(m, 0.0) == doctest::Approx(two_pi * 20e6));
    // clamped outside the table
    CHECK(blockade_at(m, 12 * um) == doctest::Approx(two_pi * 2e6));
  }

  SUBCASE("tabulated: nominal separation offsets the lookup") {
    const auto path = write_temp("rydsim_blockade_curve.txt",
                                 "7  30\n"
                                 "9  10\n"
                                 "11  4\n");
    const auto m = tabulated_blockade_from_file(path, 8.7 * um);
    CHECK(blockade_at(m, 0.0) == doctest::Approx(two_pi * (30 + (10 - 30) * 0.85) * 1e6));
    CHECK(blockade_at(m, 1.3 * um) == doctest::Approx(two_pi * 7e6));
  }

  SUBCASE("tabulated: parse errors name the line") {
    using doctest::Contains;
    const auto missing = write_temp("rydsim_blockade_missing.txt", "0 20\n5\n10 2\n");
    CHECK_THROWS_WITH_AS(tabulated_blockade_from_file(missing, 0.0),
                         Contains("line 2"), std::runtime_error);
    const auto extra = write_temp("rydsim_blockade_extra.txt", "0 20 7\n10 2\n");
    CHECK_THROWS_WITH_AS(tabulated_blockade_from_file(extra, 0.0),
                         Contains("line 1"), std::runtime_error);
    const auto order = write_temp("rydsim_blockade_order.txt", "0 20\n10 2\n10 1\n");
    CHECK_THROWS_WITH_AS(tabulated_blockade_from_file(order, 0.0),
                         Contains("increasing"), std::runtime_error);
    const auto single = write_temp("rydsim_blockade_single.txt", "0 20\n");
    CHECK_THROWS_WITH_AS(tabulated_blockade_from_file(single, 0.0),
                         Contains("two rows"), std::runtime_error);
    CHECK_THROWS_AS(tabulated_blockade_from_file("/tmp/none_such_curve.txt", 0.0),
                    std::runtime_error);
  }

  SUBCASE("van der Waals geometry") {
    BlockadeModel m;
    m.kind = BlockadeModel::Kind::VdW;
    m.separation = 8.7 * um;
    m.c6 = two_pi * 20e6 * std::pow(8.7 * um, 6);  // pinned to 20 MHz at dz=0
    CHECK(blockade_at(m, 0.0) == doctest::Approx(two_pi * 20e6));
    // symmetric in dz and strictly decreasing in |dz|
    CHECK(blockade_at(m, 2 * um) == doctest::Approx(blockade_at(m, -2 * um)));
    CHECK(blockade_at(m, 2 * um) < blockade_at(m, 0.0));
    const double expected =
        two_pi * 20e6 / std::pow(1.0 + 4.0 / (8.7 * 8.7), 3);
    CHECK(blockade_at(m, 2 * um) == doctest::Approx(expected));
  }
}

TEST_CASE("van der Waals calibration to an effective blockade") {
  const auto trap = table_trap();
  const double omega = two_pi * 1.1505e6, tau = 300e-6, w10 = two_pi * 6.83e9;
  const double target = two_pi * 5.3e6;
  const auto m = vdw_blockade_calibrated(trap, target, omega, tau, w10);

  // defining property: the error-weighted thermal average maps back to Bbar
  CHECK(effective_blockade(m, trap, omega, tau, w10) ==
        doctest::Approx(target).epsilon(1e-9));
  // the corresponding thermally averaged gate error sits at 8.4e-3
  CHECK(analytic::e1(omega, tau, target, w10) ==
        doctest::Approx(8.44e-3).epsilon(2e-3));
  // the contact value far exceeds the effective one (1/B^2 weighting)
  CHECK(blockade_at(m, 0.0) > 3 * target);
  // a constant model's effective blockade is itself
  const auto c = constant_blockade(two_pi * 7e6, trap.separation);
  CHECK(effective_blockade(c, trap, omega, tau, w10) ==
        doctest::Approx(two_pi * 7e6).epsilon(1e-9));
  CHECK_THROWS_AS(vdw_blockade_calibrated(trap, -1.0, omega, tau, w10),
                  std::invalid_argument);
}

TEST_CASE("shot sampling") {
  const auto trap = table_trap();
  const auto beams = table_beams();
  const auto mag = table_mag();
  const auto blockade = constant_blockade(two_pi * 20e6, trap.separation);

  SUBCASE("zero noise reduces to the nominal shot") {
    auto quiet = trap;
    quiet.tempA = 0;
    auto still = beams;
    still.powerFluctR = still.powerFluctB = 0;
    auto calm = mag;
    calm.sigmaB = 0;
    NoiseRng rng(7);
    const Shot s = sample_shot(quiet, still, calm, blockade, consts::massRb87, rng);
    CHECK(s.posC.norm() == 0.0);
    CHECK(s.posT.norm() == 0.0);
    CHECK(s.velC.norm() == 0.0);
    CHECK(s.dB == 0.0);
    CHECK(s.powR == 1.0);
    CHECK(s.powB == 1.0);
    CHECK(s.omegaRC == cplx(two_pi * 118e6, 0));
    CHECK(s.omegaBT == cplx(two_pi * 39e6, 0));
    CHECK(s.deltaRC == 0.0);  // compensated Stark shift
    CHECK(s.deltaRT == 0.0);
    CHECK(s.gammaPhC == 0.0);
    CHECK(s.blockade == doctest::Approx(two_pi * 20e6));

    const Shot i = ideal_shot(still, blockade);
    CHECK(i.omegaRC == s.omegaRC);
    CHECK(i.deltaRC == 0.0);
    CHECK(i.blockade == doctest::Approx(two_pi * 20e6));
  }

  SUBCASE("without compensation the beams drag the gate below resonance") {
    auto quiet = trap;
    quiet.tempA = 0;
    auto still = beams;
    still.powerFluctR = still.powerFluctB = 0;
    still.compensateStark = false;
    auto calm = mag;
    calm.sigmaB = 0;
    NoiseRng rng(7);
    const Shot s = sample_shot(quiet, still, calm, blockade, consts::massRb87, rng);
    CHECK(s.deltaRC == doctest::Approx(-two_pi * 1.550375e6).epsilon(1e-9));
    const Shot i = ideal_shot(still, blockade);
    CHECK(i.deltaRC == doctest::Approx(-two_pi * 1.550375e6).epsilon(1e-9));
  }

  SUBCASE("fixed seed reproduces the same draw") {
    NoiseRng r1(12345), r2(12345), r3(54321);
    const Shot a = sample_shot(trap, beams, mag, blockade, consts::massRb87, r1);
    const Shot b = sample_shot(trap, beams, mag, blockade, consts::massRb87, r2);
    const Shot c = sample_shot(trap, beams, mag, blockade, consts::massRb87, r3);
    CHECK(a.posC == b.posC);
    CHECK(a.velT == b.velT);
    CHECK(a.dB == b.dB);
    CHECK(a.powR == b.powR);
    CHECK(a.omegaRC == b.omegaRC);
    CHECK(a.deltaRT == b.deltaRT);
    CHECK(a.blockade == b.blockade);
    CHECK(a.posC != c.posC);
  }

  SUBCASE("per-shot structure") {
    NoiseRng rng(99);
    const Shot s = sample_shot(trap, beams, mag, blockade, consts::massRb87, rng);
    // both atoms share the same power factors but not positions
    CHECK(s.posC != s.posT);
    CHECK(s.powR > 0);
    CHECK(s.powB > 0);
    // sampled couplings stay below the peak values
    CHECK(std::abs(s.omegaRC) <= beams.rabiR0 * std::sqrt(s.powR) * (1 + 1e-12));
    CHECK(s.gammaPhC > 0);
    CHECK(s.gammaPhT > 0);
  }
}

TEST_CASE("sampled moments match the configured spreads") {
  const auto trap = table_trap();
  const auto beams = table_beams();
  const auto mag = table_mag();
  const auto blockade = constant_blockade(two_pi * 20e6, trap.separation);
  const auto pv = position_variances(trap);
  const double vv = velocity_variance(trap, consts::massRb87);

  const int n = 100000;
  NoiseRng rng(2024);
  double sumZ = 0, sumZ2 = 0, sumVx = 0, sumVx2 = 0, sumPR = 0, sumDb2 = 0;
  double sumDet = 0;
  for (int i = 0; i < n; ++i) {
    const Shot s = sample_shot(trap, beams, mag, blockade, consts::massRb87, rng);
    sumZ += s.posC.z();
    sumZ2 += s.posC.z() * s.posC.z();
    sumVx += s.velT.x();
    sumVx2 += s.velT.x() * s.velT.x();
    sumPR += s.powR;
    sumDb2 += s.dB * s.dB;
    sumDet += s.deltaRC;
  }
  const double meanZ = sumZ / n, varZ = sumZ2 / n - meanZ * meanZ;
  const double meanVx = sumVx / n, varVx = sumVx2 / n - meanVx * meanVx;

  // variances within 3% (well above the ~0.45% standard error), means within
  // three standard errors
  CHECK(varZ == doctest::Approx(pv[2]).epsilon(0.03));
  CHECK(std::abs(meanZ) < 3 * std::sqrt(pv[2] / n));
  CHECK(varVx == doctest::Approx(vv).epsilon(0.03));
  CHECK(std::abs(meanVx) < 3 * std::sqrt(vv / n));
  CHECK(sumDb2 / n == doctest::Approx(mag.sigmaB * mag.sigmaB).epsilon(0.03));
  // power factor: mean 1 with FWHM -> sigma conversion (1% FWHM)
  const double sigmaPR = 0.01 / (2 * std::sqrt(2 * std::log(2.0)));
  CHECK(sumPR / n == doctest::Approx(1.0).epsilon(3 * sigmaPR / std::sqrt(double(n))));
  // off-centre atoms see weaker beams than the fixed compensation assumes, so
  // the mean effective detuning is strictly positive
  CHECK(sumDet / n > 0);
}
