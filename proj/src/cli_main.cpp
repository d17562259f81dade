// Command-line entry point: parses the JSON configuration, dispatches the
// requested experiment, and writes CSV/JSON results plus a run manifest.
//
// Exit codes: 0 success, 2 configuration error (unreadable/invalid config,
// bad flags, unknown state label), 3 numerical or I/O failure during a run.
// Scientific outputs are written only after a run completes, so an invalid
// configuration never leaves partial files behind; the manifest is written
// last. All result bytes are independent of --threads.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydsim/analytic.hpp"
#include "rydsim/config.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/experiments.hpp"
#include "rydsim/qpt.hpp"
#include "rydsim/registry.hpp"

namespace {

using nlohmann::json;
using namespace rydsim;
using consts::two_pi;

struct CommonFlags {
  std::string configPath;
  std::string outDir = ".";
  std::uint64_t seed = 0;
  int shots = 0;
  int threads = 0;
  std::string method;
  bool ideal = false;

  CLI::Option* seedOpt = nullptr;
  CLI::Option* shotsOpt = nullptr;
  CLI::Option* threadsOpt = nullptr;
  CLI::Option* methodOpt = nullptr;
  CLI::Option* idealOpt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needsConfig) {
  CLI::Option* cfg = cmd->add_option("--config", f.configPath,
                                     "Experiment configuration (JSON)");
  if (needsConfig) cfg->required();
  cmd->add_option("--out", f.outDir, "Output directory (default: .)");
  f.seedOpt = cmd->add_option("--seed", f.seed, "Override run.seed");
  f.shotsOpt = cmd->add_option("--shots", f.shots, "Override run.shots");
  f.threadsOpt =
      cmd->add_option("--threads", f.threads, "Override run.threads");
  f.methodOpt = cmd->add_option("--method", f.method, "Integrator")
                    ->check(CLI::IsMember({"expm", "rk4"}));
  f.idealOpt = cmd->add_flag("--ideal", f.ideal,
                             "Ideal mode: no noise, no decay, deep blockade");
}

void apply_overrides(ExperimentConfig& cfg, const CommonFlags& f) {
  if (f.seedOpt->count() > 0) cfg.seed = f.seed;
  if (f.shotsOpt->count() > 0) cfg.nShots = f.shots;
  if (f.threadsOpt->count() > 0) cfg.threads = f.threads;
  if (f.methodOpt->count() > 0)
    cfg.method = f.method == "rk4" ? Method::Rk4 : Method::Expm;
  if (f.idealOpt->count() > 0) cfg.ideal = true;
}

std::string method_name(Method m) { return m == Method::Rk4 ? "rk4" : "expm"; }

/// Canonical digest of a JSON file (key-order independent), for manifests of
/// commands whose input is a data file rather than an experiment config.
std::string digest_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "fnv1a:unavailable";
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception&) {
    return "fnv1a:unavailable";
  }
  return "fnv1a:" + config::fnv1a_hex(doc.dump());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good())
    throw std::runtime_error("cannot write output file '" + path.string() +
                             "'");
  out << text;
  if (!out.good())
    throw std::runtime_error("short write to '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

/// Timer + manifest bookkeeping shared by every subcommand.
class Run {
 public:
  Run(std::string command, std::string digest, std::uint64_t seed,
      const std::string& outDir)
      : command_(std::move(command)),
        digest_(std::move(digest)),
        seed_(seed),
        outDir_(outDir),
        start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(outDir_);
  }

  std::filesystem::path path(const std::string& name) const {
    return outDir_ / name;
  }

  void emit(const std::string& name, const std::string& text) {
    write_text(path(name), text);
    outputs_.push_back(name);
  }

  void emit(const std::string& name, const json& doc) {
    write_json(path(name), doc);
    outputs_.push_back(name);
  }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    json manifest;
    manifest["command"] = command_;
    manifest["config_digest"] = digest_;
    manifest["seed"] = seed_;
    manifest["version"] = config::kToolkitVersion;
    manifest["wall_time_s"] = wall;
    manifest["outputs"] = outputs_;
    write_json(path("manifest.json"), manifest);
  }

 private:
  std::string command_;
  std::string digest_;
  std::uint64_t seed_;
  std::filesystem::path outDir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

const std::array<const char*, 4> kBasisLabels = {"00", "01", "10", "11"};

int cmd_truth_table(const CommonFlags& f) {
  config::LoadedConfig lc = config::load_file(f.configPath);
  apply_overrides(lc.experiment, f);
  const TruthTableResult res = truth_table(lc.experiment);

  std::string csv = "input,output,probability,stderr\n";
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out)
      csv += std::string(kBasisLabels[in]) + "," + kBasisLabels[out] + "," +
             fmt(res.table(in, out)) + "," + fmt(res.tableStderr(in, out)) +
             "\n";
  csv += "fidelity_loss_corrected,," + fmt(res.fidelityLossCorrected) + "," +
         fmt(res.stderrLoss) + "\n";
  csv += "fidelity_trace_corrected,," + fmt(res.fidelityTraceCorrected) +
         ",\n";
  csv += "fidelity_raw,," + fmt(res.fidelityRaw) + ",\n";
  csv += "trace_loss_mean,," + fmt(res.meanTraceLoss) + ",\n";

  json rec;
  rec["command"] = "truth-table";
  rec["shots"] = lc.experiment.ideal ? 1 : lc.experiment.nShots;
  rec["seed"] = lc.experiment.seed;
  rec["method"] = method_name(lc.experiment.method);
  rec["ideal"] = lc.experiment.ideal;
  rec["fidelity_loss_corrected"] = res.fidelityLossCorrected;
  rec["fidelity_trace_corrected"] = res.fidelityTraceCorrected;
  rec["fidelity_raw"] = res.fidelityRaw;
  rec["stderr_loss_corrected"] = res.stderrLoss;
  rec["trace_loss_mean"] = res.meanTraceLoss;
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out) {
      rec["table"][in][out] = res.table(in, out);
      rec["table_stderr"][in][out] = res.tableStderr(in, out);
    }

  Run run("truth-table", lc.digest, lc.experiment.seed, f.outDir);
  run.emit("truth_table.csv", csv);
  run.emit("results.json", rec);
  run.finish();
  return 0;
}

int cmd_bell(const CommonFlags& f) {
  config::LoadedConfig lc = config::load_file(f.configPath);
  apply_overrides(lc.experiment, f);
  const BellResult res = bell_experiment(lc.experiment);

  json rec;
  rec["command"] = "bell";
  rec["shots"] = lc.experiment.ideal ? 1 : lc.experiment.nShots;
  rec["seed"] = lc.experiment.seed;
  rec["method"] = method_name(lc.experiment.method);
  rec["ideal"] = lc.experiment.ideal;
  rec["fidelity_corrected"] = res.fidelityCorrected;
  rec["fidelity_raw"] = res.fidelityRaw;
  rec["stderr_corrected"] = res.stderrCorrected;

  Run run("bell", lc.digest, lc.experiment.seed, f.outDir);
  run.emit("results.json", rec);
  run.finish();
  return 0;
}

json chi_record(const std::string& label, const CMatrix& chi) {
  json rec;
  rec["label"] = label;
  rec["basis"] = "sigma_i (x) sigma_j over {I,X,Y,Z}, index m = 4*i + j";
  for (int i = 0; i < chi.rows(); ++i)
    for (int j = 0; j < chi.cols(); ++j) {
      rec["real"][i][j] = chi(i, j).real();
      rec["imag"][i][j] = chi(i, j).imag();
    }
  return rec;
}

int cmd_qpt(const CommonFlags& f, const std::string& stateLabel,
            const std::string& sequence, const std::string& calibration,
            double gapNs) {
  const registry::RydbergStateParams& st = registry::find_state(stateLabel);
  GateModel gate;
  gate.kind = ModelKind::SixLevel;
  gate.base6 = registry::scheme6_for(st, st.quotedRabi);
  gate.blockade6 = registry::blockade3_for(st);
  const Shot shot;  // the six-level scheme is intrinsic: no sampled noise
  const Method method = f.method == "rk4" ? Method::Rk4 : Method::Expm;
  const int threads = f.threadsOpt->count() > 0 ? std::max(1, f.threads) : 1;
  const double tGap = gapNs * 1e-9;

  PropagatorCache cache;
  double phi = 0.0;
  PulseSequence core;
  if (sequence == "standard") {
    core = standard_cz(tGap);
  } else {
    CalibrationOptions opts;
    opts.numeric = calibration == "numeric";
    opts.tGap = tGap;
    opts.method = method;
    opts.cache = &cache;
    phi = calibrate_phase(gate, shot, opts);
    core = modified_cz(phi, tGap);
  }
  const auto theta =
      nominal_z_phases(core, without_decay(gate), shot, method, &cache);
  const PulseSequence seq = z_corrected(core, theta[0], theta[1]);

  const auto inputs = input_states();
  const ChannelOutputs outputs =
      simulate_channel(seq, shot, gate, method, &cache, threads);
  const ChiMatrix chiSim = chi_mle(inputs, outputs.rho);
  const ChiMatrix chiId = chi_ideal(cz_unitary());

  const double eO = error_overlap(chiId, chiSim);
  const double eD = error_distance(chiId, chiSim);
  const double traceLossChi = 1.0 - chiSim.entries.trace().real();
  double traceLossInputs = 0.0;
  for (double l : outputs.traceLoss) traceLossInputs += l / 16.0;

  json rec;
  rec["command"] = "qpt";
  rec["state"] = st.label;
  rec["sequence"] = sequence;
  rec["calibration"] = sequence == "standard" ? "none" : calibration;
  rec["phase_rad"] = phi;
  rec["z_phases_rad"] = {theta[0], theta[1]};
  rec["rabi_MHz"] = st.quotedRabi / two_pi / 1e6;
  rec["e_overlap"] = eO;
  rec["e_distance"] = eD;
  rec["trace_loss"] = traceLossChi;
  rec["trace_loss_inputs_mean"] = traceLossInputs;
  rec["mle_residual"] = chiSim.residual;
  rec["mle_iterations"] = chiSim.iterations;

  const std::string registryPath =
      registry::data_dir() + "/rydberg_states.json";
  Run run("qpt", digest_json_file(registryPath), 0, f.outDir);
  run.emit("chi_sim.json", chi_record("chi_sim", chiSim.entries));
  run.emit("chi_ideal.json", chi_record("chi_ideal", chiId.entries));
  run.emit("results.json", rec);
  run.finish();
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& param, double from,
              double to, int points, bool linear) {
  config::LoadedConfig lc = config::load_file(f.configPath);
  apply_overrides(lc.experiment, f);

  SweepParam sp = SweepParam::Omega;
  double unit = two_pi * 1e6;  // MHz for omega and blockade
  if (param == "omega") {
    sp = SweepParam::Omega;
  } else if (param == "blockade") {
    sp = SweepParam::Blockade;
  } else if (param == "tau") {
    sp = SweepParam::Tau;
    unit = 1e-6;  // microseconds
  } else {
    throw config::ConfigError(
        "config: --param must be one of omega, blockade, tau");
  }
  if (!(from > 0) || !(to > 0))
    throw config::ConfigError("config: --from/--to must be positive");
  if (points < 1)
    throw config::ConfigError("config: --points must be at least 1");

  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    grid[k] = linear ? from + (to - from) * t
                     : from * std::pow(to / from, t);
    grid[k] *= unit;
  }

  const auto curve = intrinsic_sweep(sp, grid, lc.experiment);

  std::string csv = "param,E_num,E_tau,E_B\n";
  for (const SweepPoint& p : curve)
    csv += fmt(p.value / unit) + "," + fmt(p.eNumeric) + "," + fmt(p.eTau) +
           "," + fmt(p.eB) + "\n";

  Run run("sweep", lc.digest, lc.experiment.seed, f.outDir);
  run.emit("sweep.csv", csv);
  run.finish();
  return 0;
}

int cmd_analytic(const CommonFlags& f, const std::string& stateLabel,
                 double rabiMHzOverride) {
  const registry::RydbergStateParams& st = registry::find_state(stateLabel);
  const double omega =
      rabiMHzOverride > 0 ? two_pi * 1e6 * rabiMHzOverride : st.quotedRabi;
  const double x = omega / st.omega10;

  std::printf("state                 %s (%s)\n", st.label.c_str(),
              st.species == registry::Species::Rb87 ? "Rb87" : "Cs");
  std::printf("omega10/2pi           %.6g MHz\n", st.omega10 / two_pi / 1e6);
  std::printf("tau                   %.6g us\n", st.tau * 1e6);
  std::printf("separation            %.6g um\n", st.separation * 1e6);
  std::printf("Bnn/2pi               %.6g MHz\n", st.bnn / two_pi / 1e6);
  std::printf("Omega/2pi             %.6g MHz\n", omega / two_pi / 1e6);
  std::printf("\nintrinsic error budget at Omega, B = Bnn\n");
  std::printf("E1 (decay + phase)    %.6g\n",
              analytic::e1(omega, st.tau, st.bnn, st.omega10));
  std::printf("E2 (phase-fixed)      %.6g\n",
              analytic::e2(omega, st.tau, st.bnn, st.omega10));
  std::printf("Omega1_opt/2pi        %.6g MHz\n",
              analytic::omega1_opt(st.bnn, st.tau) / two_pi / 1e6);
  std::printf("E1_min                %.6g\n", analytic::e1_min(st.bnn, st.tau));
  std::printf("Omega2_opt/2pi        %.6g MHz\n",
              analytic::omega2_opt(st.bnn, st.tau) / two_pi / 1e6);
  std::printf("E2_min                %.6g\n", analytic::e2_min(st.bnn, st.tau));
  std::printf("\noff-resonant excitation (computational basis)\n");
  std::printf("E_B at x = %.4g       %.6g\n", x, st.blockade_error(x));
  const analytic::CbOptimum opt = st.cb_optimum();
  std::printf("Omega_opt/2pi         %.6g MHz\n",
              opt.omegaOpt / two_pi / 1e6);
  std::printf("E_cb                  %.6g\n", opt.eCb);
  if (st.referenceEcb > 0)
    std::printf("E_cb (reference)      %.6g\n", st.referenceEcb);

  const std::string registryPath =
      registry::data_dir() + "/rydberg_states.json";
  Run run("analytic", digest_json_file(registryPath), 0, f.outDir);
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-atom Rydberg-blockade gate simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", config::kToolkitVersion);

  CommonFlags fTruth, fBell, fQpt, fSweep, fAnalytic;

  CLI::App* truth = app.add_subcommand(
      "truth-table", "CNOT probability truth table over noise shots");
  add_common(truth, fTruth, true);

  CLI::App* bell =
      app.add_subcommand("bell", "Bell-state preparation fidelity");
  add_common(bell, fBell, true);

  CLI::App* qptCmd = app.add_subcommand(
      "qpt", "Process tomography of the intrinsic six-level gate");
  add_common(qptCmd, fQpt, false);
  std::string state, sequence = "standard", calibration = "numeric";
  double gapNs = 0.0;
  qptCmd->add_option("--state", state, "Registry state label, e.g. 76p3/2")
      ->required();
  qptCmd->add_option("--sequence", sequence, "Gate sequence")
      ->check(CLI::IsMember({"standard", "modified"}));
  qptCmd
      ->add_option("--calibration", calibration,
                   "Compensation-phase source for the modified sequence")
      ->check(CLI::IsMember({"numeric", "analytic"}));
  qptCmd->add_option("--gap-ns", gapNs, "Gap duration between pulses (ns)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Intrinsic-error sweep vs the closed-form budget");
  add_common(sweep, fSweep, true);
  std::string param;
  double from = 0, to = 0;
  int points = 8;
  bool linear = false;
  sweep->add_option("--param", param, "Swept parameter: omega, blockade, tau")
      ->required()
      ->check(CLI::IsMember({"omega", "blockade", "tau"}));
  sweep
      ->add_option("--from", from,
                   "Grid start (MHz for omega/blockade, us for tau)")
      ->required();
  sweep->add_option("--to", to, "Grid end (same units)")->required();
  sweep->add_option("--points", points, "Grid size (default 8)");
  sweep->add_flag("--linear", linear, "Linear spacing (default: log)");

  CLI::App* analyticCmd = app.add_subcommand(
      "analytic", "Closed-form error estimates for a registry state");
  add_common(analyticCmd, fAnalytic, false);
  std::string analyticState;
  double rabiMHz = 0.0;
  analyticCmd
      ->add_option("state", analyticState, "Registry state label, e.g. 76p3/2")
      ->required();
  analyticCmd->add_option("--rabi-MHz", rabiMHz,
                          "Evaluate at this Rabi frequency instead of the "
                          "state's reference value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (truth->parsed()) return cmd_truth_table(fTruth);
    if (bell->parsed()) return cmd_bell(fBell);
    if (qptCmd->parsed())
      return cmd_qpt(fQpt, state, sequence, calibration, gapNs);
    if (sweep->parsed())
      return cmd_sweep(fSweep, param, from, to, points, linear);
    if (analyticCmd->parsed()) return cmd_analytic(fAnalytic, analyticState, rabiMHz);
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
