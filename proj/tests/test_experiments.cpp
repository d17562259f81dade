#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rydsim/analytic.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/experiments.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;
using consts::two_pi;

namespace {

// Compact two-atom configuration tuned for fast exponentials: the leg Rabi
// rates sit at 1/20 of the intermediate detuning, so coherent leakage stays
// a few 1e-3 while each propagator stays cheap to build.
ExperimentConfig smoke_config() {
  ExperimentConfig cfg;
  cfg.model = ModelKind::FiveLevel;
  cfg.omega10 = two_pi * 30e6;
  cfg.gammaP = two_pi * 1e3;
  cfg.gammaR = 500.0;
  cfg.mass = consts::massRb87;
  cfg.beams.rabiR0 = two_pi * 10e6;
  cfg.beams.rabiB0 = two_pi * 10e6;
  cfg.beams.deltaP = -two_pi * 200e6;  // Omega2 = 2pi * 0.25 MHz
  cfg.beams.waistXR = cfg.beams.waistYR = 3e-6;
  cfg.beams.waistXB = cfg.beams.waistYB = 3e-6;
  cfg.beams.lambdaR = 795e-9;
  cfg.beams.lambdaB = 474e-9;
  cfg.beams.powerFluctR = cfg.beams.powerFluctB = 0.01;
  cfg.trap.lambdaF = 830e-9;
  cfg.trap.waistF = 1.2e-6;
  cfg.trap.depthOverKb = 1e-3;
  cfg.trap.separation = 3e-6;
  cfg.trap.tempA = 20e-6;
  cfg.mag.biasBz = 5e-4;
  cfg.mag.sigmaB = 2e-7;
  cfg.blockade = constant_blockade(two_pi * 20e6, 3e-6);
  cfg.tGap = 50e-9;
  cfg.nShots = 2;
  cfg.seed = 11;
  return cfg;
}

} // namespace

TEST_CASE("monte_carlo_stats") {
  SUBCASE("two-point example") {
    const auto s = monte_carlo_stats({0.0, 1.0});
    CHECK(s.first == doctest::Approx(0.5));
    CHECK(s.second == doctest::Approx(0.353553).epsilon(1e-4));
  }
  SUBCASE("constant sample has zero spread") {
    const auto s = monte_carlo_stats({0.7, 0.7, 0.7, 0.7});
    CHECK(s.first == doctest::Approx(0.7));
    CHECK(s.second == doctest::Approx(0.0));
  }
  SUBCASE("standard normal sample") {
    NoiseRng rng(5);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = rng.normal();
    const auto s = monte_carlo_stats(xs);
    CHECK(s.second == doctest::Approx(0.01).epsilon(0.05));
    CHECK(std::abs(s.first) < 4.0 * s.second);
  }
  SUBCASE("needs at least two values") {
    CHECK_THROWS_AS(monte_carlo_stats({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_stats({}), std::invalid_argument);
  }
}

TEST_CASE("configuration validation") {
  ExperimentConfig cfg = smoke_config();
  CHECK_NOTHROW(cfg.validate());

  ExperimentConfig bad = cfg;
  bad.nShots = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), "ExperimentConfig.nShots must be >= 1",
                       std::invalid_argument);
  bad = cfg;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.rk4Divisor = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.prepTarget = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.prepTarget = 0.9;
  bad.prepReservoir = 0.2;  // populations exceed one
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.backgroundLossTwoAtom = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.tGap = -1e-9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.omega10 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gate model wiring") {
  const ExperimentConfig cfg = smoke_config();
  const GateModel gate = gate_model(cfg);
  CHECK(gate.kind == ModelKind::FiveLevel);
  CHECK(gate.base5.omega10 == cfg.omega10);
  CHECK(gate.base5.omegaR == cfg.beams.rabiR0);
  CHECK(gate.base5.omegaB == cfg.beams.rabiB0);
  CHECK(gate.base5.deltaP == cfg.beams.deltaP);
  CHECK(gate.base5.gammaP == cfg.gammaP);
  CHECK(gate.base5.gammaR == cfg.gammaR);
  CHECK(gate.base5.gamma01 ==
        doctest::Approx(gamma_01(cfg.mag, cfg.trap, cfg.omega10)));
  CHECK(gate.two_photon_rabi() == doctest::Approx(two_pi * 0.25e6));

  ExperimentConfig six = cfg;
  six.model = ModelKind::SixLevel;
  six.scheme6.rabi = {two_pi * 1e6, 0.0, 0.0};
  six.scheme6.gammaR = 750.0;
  six.blockadePair6 = BlockadeSpec::scalar(two_pi * 40e6);
  const GateModel g6 = gate_model(six);
  CHECK(g6.kind == ModelKind::SixLevel);
  CHECK(g6.base6.gammaR == 750.0);
  CHECK(g6.blockade6.rr() == doctest::Approx(two_pi * 40e6));
}

TEST_CASE("calibrated core structure") {
  const ExperimentConfig cfg = smoke_config();
  const PulseSequence core = calibrated_core(cfg, gate_model(cfg));
  CHECK(core.label == "standard_cz+zcal");
  // pi - gap - 2pi - gap - pi plus the two trailing frame corrections.
  REQUIRE(core.segments.size() == 7);
  const auto* zc = std::get_if<PhaseZ>(&core.segments[5]);
  const auto* zt = std::get_if<PhaseZ>(&core.segments[6]);
  REQUIRE(zc != nullptr);
  REQUIRE(zt != nullptr);
  CHECK(zc->atom == Atom::Control);
  CHECK(zt->atom == Atom::Target);
  // Both corrections undo accumulated light-shift phases, so they are
  // nonzero and well inside one turn.
  CHECK(std::abs(zc->angle) > 1e-6);
  CHECK(std::abs(zc->angle) < two_pi);
  CHECK(std::abs(zt->angle) < two_pi);

  const PulseSequence cnotSeq = cnot_from_core(core);
  CHECK(cnotSeq.segments.size() == 9);
  const PulseSequence bellSeq = bell_from_core(core);
  CHECK(bellSeq.segments.size() == 10);
}

TEST_CASE("ideal-mode truth table") {
  ExperimentConfig cfg = smoke_config();
  cfg.ideal = true;
  cfg.nShots = 50;  // ignored in ideal mode
  const TruthTableResult res = truth_table(cfg);

  // Ideal mode keeps only the preparation loss (0.98^2 per pair) plus a few
  // 1e-3 of coherent intermediate-state leakage.
  CHECK(res.fidelityLossCorrected == doctest::Approx(0.9604).epsilon(0.01));
  CHECK(res.fidelityTraceCorrected > 0.995);
  CHECK(res.fidelityRaw ==
        doctest::Approx(res.fidelityLossCorrected * 0.81).epsilon(1e-12));
  CHECK(res.meanTraceLoss > 0.03);
  CHECK(res.meanTraceLoss < 0.06);
  CHECK(res.stderrLoss == 0.0);

  // The averaged table is the CNOT permutation: target flips when the
  // control occupies |0>.
  const std::array<int, 4> perm = {1, 0, 2, 3};
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out) {
      if (out == perm[in])
        CHECK(res.table(in, out) > 0.95);
      else
        CHECK(res.table(in, out) < 0.01);
    }
}

TEST_CASE("noisy truth table is deterministic and below ideal") {
  ExperimentConfig cfg = smoke_config();
  cfg.nShots = 2;
  const TruthTableResult a = truth_table(cfg);

  ExperimentConfig threaded = cfg;
  threaded.threads = 3;
  const TruthTableResult b = truth_table(threaded);

  // Per-shot seeding and slot-indexed reduction make the result independent
  // of the worker count, bit for bit.
  CHECK((a.table - b.table).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.tableStderr - b.tableStderr).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.tableStderr.maxCoeff() > 0.0);
  CHECK(a.fidelityLossCorrected == b.fidelityLossCorrected);
  CHECK(a.fidelityTraceCorrected == b.fidelityTraceCorrected);
  CHECK(a.fidelityRaw == b.fidelityRaw);
  CHECK(a.stderrLoss == b.stderrLoss);
  CHECK(a.meanTraceLoss == b.meanTraceLoss);

  // Technical noise (Doppler, position spread, intensity, decay) costs
  // fidelity relative to the ideal-mode 0.958 measured above.
  CHECK(a.fidelityLossCorrected < 0.95);
  CHECK(a.fidelityLossCorrected > 0.5);
  CHECK(a.stderrLoss > 0.0);

  // Probability-table invariants: entries are probabilities and rows sum to
  // at most one before normalization.
  CHECK(a.table.minCoeff() >= 0.0);
  CHECK(a.table.maxCoeff() <= 1.0 + 1e-9);
  for (int in = 0; in < 4; ++in) CHECK(a.table.row(in).sum() <= 1.0 + 1e-9);
}

TEST_CASE("hotter atoms lower the Bell fidelity") {
  ExperimentConfig cold = smoke_config();
  cold.nShots = 2;
  cold.trap.tempA = 0.0;
  const BellResult c = bell_experiment(cold);

  ExperimentConfig hot = cold;
  hot.trap.tempA = 175e-6;
  const BellResult h = bell_experiment(hot);

  // Doppler detuning and position spread grow with temperature; the drop
  // must clear the combined shot-noise error bars.
  const double sep = std::sqrt(c.stderrCorrected * c.stderrCorrected +
                               h.stderrCorrected * h.stderrCorrected);
  CHECK(c.fidelityCorrected - h.fidelityCorrected > 2.0 * sep);
  CHECK(c.fidelityCorrected > h.fidelityCorrected);
}

TEST_CASE("ideal-mode Bell pair") {
  ExperimentConfig cfg = smoke_config();
  cfg.ideal = true;
  const BellResult res = bell_experiment(cfg);
  CHECK(res.fidelityCorrected > 0.99);
  CHECK(res.fidelityRaw ==
        doctest::Approx(res.fidelityCorrected * 0.81).epsilon(1e-12));
  CHECK(res.stderrCorrected == 0.0);
}

TEST_CASE("intrinsic sweep matches the closed-form budget") {
  ExperimentConfig base = smoke_config();
  base.omega10 = two_pi * 6.83e9;
  base.gammaR = 1.0 / 300e-6;
  base.blockade = constant_blockade(two_pi * 10e6, 3e-6);
  // Nominal beams that give a 2pi * 1.15 MHz two-photon Rabi rate.
  const double omega0 = two_pi * 1.15e6;
  base.beams.deltaP = -two_pi * 1e9;
  base.beams.rabiR0 = base.beams.rabiB0 =
      std::sqrt(2.0 * std::abs(base.beams.deltaP) * omega0);

  const std::vector<double> grid = {omega0, 2.0 * omega0};
  const auto curve = intrinsic_sweep(SweepParam::Omega, grid, base);
  REQUIRE(curve.size() == 2);

  for (std::size_t k = 0; k < curve.size(); ++k) {
    const SweepPoint& p = curve[k];
    CHECK(p.value == grid[k]);
    CHECK(p.eTau == doctest::Approx(analytic::e1_decay_term(
                        grid[k], 300e-6, two_pi * 10e6, base.omega10)));
    CHECK(p.eB == doctest::Approx(analytic::e1_phase_term(grid[k], two_pi * 10e6,
                                                          base.omega10)));
    // The simulated intrinsic error tracks the closed-form budget.
    CHECK(p.eNumeric ==
          doctest::Approx(p.eTau + p.eB).epsilon(0.2));
  }

  // At the base point the budget itself is the known 4.19e-3.
  CHECK(curve[0].eTau + curve[0].eB == doctest::Approx(4.19e-3).epsilon(0.01));

  ExperimentConfig bad = base;
  bad.model = ModelKind::SixLevel;
  CHECK_THROWS_AS(intrinsic_sweep(SweepParam::Omega, grid, bad),
                  std::invalid_argument);
}
