#include "rydsim/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rydsim/constants.hpp"

namespace rydsim::config {

namespace {

using nlohmann::json;
using consts::two_pi;

constexpr double kMHz = two_pi * 1e6;  ///< quoted MHz -> rad/s
constexpr double kUm = 1e-6;
constexpr double kUK = 1e-6;
constexpr double kNs = 1e-9;
constexpr double kUT = 1e-6;

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError("config: " + message);
}

/// One section of the document. Reads are tracked so that finish() can
/// reject unknown keys with their full path.
class Section {
 public:
  Section(const json& doc, const std::string& name) : name_(name) {
    if (!doc.contains(name)) fail("missing section '" + name + "'");
    if (!doc[name].is_object())
      fail("section '" + name + "' must be a JSON object");
    obj_ = &doc[name];
  }

  double number(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) fail("missing key '" + path(key) + "'");
    if (!v->is_number()) fail("key '" + path(key) + "' must be a number");
    return v->get<double>();
  }

  double number(const std::string& key, double dflt) {
    const json* v = get(key);
    if (v == nullptr) return dflt;
    if (!v->is_number()) fail("key '" + path(key) + "' must be a number");
    return v->get<double>();
  }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0)) fail("key '" + path(key) + "' must be positive");
    return v;
  }

  bool boolean(const std::string& key, bool dflt) {
    const json* v = get(key);
    if (v == nullptr) return dflt;
    if (!v->is_boolean()) fail("key '" + path(key) + "' must be a boolean");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& dflt) {
    const json* v = get(key);
    if (v == nullptr) return dflt;
    if (!v->is_string()) fail("key '" + path(key) + "' must be a string");
    return v->get<std::string>();
  }

  bool has(const std::string& key) const { return obj_->contains(key); }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  /// Reject any key that was never requested.
  void finish() const {
    for (const auto& item : obj_->items())
      if (seen_.count(item.key()) == 0)
        fail("unknown key '" + path(item.key()) + "'");
  }

 private:
  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!obj_->contains(key)) return nullptr;
    return &(*obj_)[key];
  }

  const json* obj_ = nullptr;
  std::string name_;
  std::set<std::string> seen_;
};

TrapParams parse_trap(const json& doc) {
  Section s(doc, "trap");
  TrapParams t;
  t.lambdaF = s.positive("wavelength_um") * kUm;
  t.waistF = s.positive("waist_um") * kUm;
  t.depthOverKb = s.positive("depth_uK") * kUK;
  t.separation = s.positive("separation_um") * kUm;
  t.tempA = s.number("temperature_uK") * kUK;
  if (t.tempA < 0) fail("key 'trap.temperature_uK' must be nonnegative");
  s.finish();
  return t;
}

BeamParams parse_beams(const json& doc) {
  Section s(doc, "beams");
  BeamParams b;
  b.waistXR = s.positive("waist_x_r_um") * kUm;
  b.waistYR = s.positive("waist_y_r_um") * kUm;
  b.waistXB = s.positive("waist_x_b_um") * kUm;
  b.waistYB = s.positive("waist_y_b_um") * kUm;
  b.lambdaR = s.positive("wavelength_r_um") * kUm;
  b.lambdaB = s.positive("wavelength_b_um") * kUm;
  b.rabiR0 = s.positive("rabi_r_MHz") * kMHz;
  b.rabiB0 = s.positive("rabi_b_MHz") * kMHz;
  b.deltaP = s.number("detuning_p_MHz") * kMHz;
  if (b.deltaP == 0) fail("key 'beams.detuning_p_MHz' must be nonzero");
  b.deltaAC0 = s.number("detuning_offset_MHz", 0.0) * kMHz;
  b.powerFluctR = s.number("power_fluct_r");
  b.powerFluctB = s.number("power_fluct_b");
  if (b.powerFluctR < 0 || b.powerFluctB < 0)
    fail("beams power fluctuations must be nonnegative");
  b.compensateStark = s.boolean("compensate_stark", true);
  s.finish();
  return b;
}

MagneticModel parse_magnetic(const json& doc) {
  Section s(doc, "magnetic");
  MagneticModel m;
  m.biasBz = s.number("bias_uT") * kUT;
  m.sigmaB = s.number("noise_uT") * kUT;
  if (m.sigmaB < 0) fail("key 'magnetic.noise_uT' must be nonnegative");
  m.gRyd = s.number("g_ryd", m.gRyd);
  m.mRyd = s.number("m_ryd", m.mRyd);
  m.gGround = s.number("g_ground", m.gGround);
  m.mGround = s.number("m_ground", m.mGround);
  s.finish();
  return m;
}

/// Parsed after trap/beams/gate: the calibrated van-der-Waals model needs
/// the trap geometry and the nominal gate parameters.
BlockadeModel parse_blockade(const json& doc, const std::string& baseDir,
                             const TrapParams& trap, const BeamParams& beams,
                             double tauR, double omega10) {
  Section s(doc, "blockade");
  const std::string model = s.text("model", "constant");
  BlockadeModel out;
  if (model == "constant") {
    out = constant_blockade(s.positive("b0_MHz") * kMHz, trap.separation);
  } else if (model == "tabulated") {
    const std::string file = s.text("curve_file", "");
    if (file.empty()) fail("missing key 'blockade.curve_file'");
    std::filesystem::path p(file);
    if (p.is_relative()) p = std::filesystem::path(baseDir) / p;
    try {
      out = tabulated_blockade_from_file(p.string(), trap.separation);
    } catch (const std::exception& e) {
      fail("key 'blockade.curve_file': " + std::string(e.what()));
    }
  } else if (model == "vdw_calibrated") {
    const double bbar = s.positive("bbar_MHz") * kMHz;
    const double omega =
        std::abs(beams.rabiR0 * beams.rabiB0) / (2.0 * std::abs(beams.deltaP));
    out = vdw_blockade_calibrated(trap, bbar, omega, tauR, omega10);
  } else {
    fail("key 'blockade.model' must be one of \"constant\", \"tabulated\", "
         "\"vdw_calibrated\"");
  }
  s.finish();
  return out;
}

std::string canonical_dump(const json& doc) {
  // nlohmann::json stores object members sorted by key, so dump() of the
  // parsed document is already independent of the file's key order.
  return doc.dump();
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

LoadedConfig parse(const std::string& text, const std::string& baseDir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) fail("top level must be a JSON object");
  for (const auto& item : doc.items()) {
    static const std::set<std::string> sections = {
        "trap", "beams", "magnetic", "blockade", "gate", "run"};
    if (sections.count(item.key()) == 0)
      fail("unknown section '" + item.key() + "'");
  }

  LoadedConfig out;
  ExperimentConfig& cfg = out.experiment;
  cfg.trap = parse_trap(doc);
  cfg.beams = parse_beams(doc);
  cfg.mag = parse_magnetic(doc);

  {
    Section s(doc, "gate");
    const std::string model = s.text("model", "five_level");
    if (model != "five_level")
      fail("key 'gate.model': only \"five_level\" configurations are "
           "supported; six-level runs take their parameters from the state "
           "registry");
    cfg.model = ModelKind::FiveLevel;
    cfg.omega10 = s.positive("omega10_MHz") * kMHz;
    cfg.gammaP = s.number("gamma_p_MHz") * kMHz;
    if (cfg.gammaP < 0) fail("key 'gate.gamma_p_MHz' must be nonnegative");
    cfg.gammaR = 1.0 / (s.positive("tau_r_ns") * kNs);
    cfg.tGap = s.number("t_gap_ns", 500.0) * kNs;
    if (cfg.tGap < 0) fail("key 'gate.t_gap_ns' must be nonnegative");
    cfg.prepTarget = s.number("prep_target", 0.98);
    cfg.prepReservoir = s.number("prep_reservoir", 0.02);
    cfg.backgroundLossTwoAtom = s.number("background_loss", 0.19);
    const std::string species = s.text("species", "Rb87");
    if (species == "Rb87") {
      cfg.mass = consts::massRb87;
    } else if (species == "Cs") {
      cfg.mass = consts::massCs133;
    } else {
      fail("key 'gate.species' must be \"Rb87\" or \"Cs\"");
    }
    s.finish();
  }

  cfg.blockade = parse_blockade(doc, baseDir, cfg.trap, cfg.beams,
                                1.0 / cfg.gammaR, cfg.omega10);

  {
    Section s(doc, "run");
    cfg.nShots = static_cast<int>(s.number("shots", 100));
    cfg.seed = static_cast<std::uint64_t>(s.number("seed", 1));
    cfg.threads = static_cast<int>(s.number("threads", 1));
    const std::string method = s.text("method", "expm");
    if (method == "expm") {
      cfg.method = Method::Expm;
    } else if (method == "rk4") {
      cfg.method = Method::Rk4;
    } else {
      fail("key 'run.method' must be \"expm\" or \"rk4\"");
    }
    cfg.rk4Divisor = static_cast<int>(s.number("rk4_divisor", 40));
    cfg.ideal = s.boolean("ideal", false);
    s.finish();
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }

  out.digest = "fnv1a:" + fnv1a_hex(canonical_dump(doc));
  return out;
}

LoadedConfig load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) fail("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  LoadedConfig out =
      parse(text.str(), std::filesystem::path(path).parent_path().string());
  out.sourcePath = path;
  return out;
}

}  // namespace rydsim::config
