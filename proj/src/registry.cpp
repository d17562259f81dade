#include "rydsim/registry.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rydsim/constants.hpp"

namespace rydsim::registry {

namespace {

using nlohmann::json;

std::vector<RydbergStateParams> g_states;
bool g_loaded = false;
std::mutex g_mutex;

double require_number(const json& rec, const std::string& label,
                      const std::string& key) {
  if (!rec.contains(key) || !rec[key].is_number()) {
    throw std::runtime_error("registry state '" + label +
                             "': missing or non-numeric field '" + key + "'");
  }
  return rec[key].get<double>();
}

double optional_number(const json& rec, const std::string& key, double dflt) {
  if (!rec.contains(key)) return dflt;
  if (!rec[key].is_number())
    throw std::runtime_error("registry: non-numeric field '" + key + "'");
  return rec[key].get<double>();
}

/// The printed ratios are rounded (often to two figures), so the consistency
/// check allows 2% plus an absolute slack matching the print granularity.
void check_ratio(const std::string& label, const std::string& name,
                 double stored, double computed, double slack) {
  const double tol = std::max(0.02 * std::abs(computed), slack);
  if (std::abs(stored - computed) > tol) {
    std::ostringstream os;
    os << "registry state '" << label << "': ratio " << name << " = " << stored
       << " inconsistent with dimensional value " << computed;
    throw std::runtime_error(os.str());
  }
}

RydbergStateParams parse_state(const json& rec) {
  RydbergStateParams st;
  if (!rec.contains("label") || !rec["label"].is_string())
    throw std::runtime_error("registry: state record without a 'label'");
  st.label = rec["label"].get<std::string>();

  const std::string species = rec.value("species", "");
  if (species == "Rb87") {
    st.species = Species::Rb87;
  } else if (species == "Cs") {
    st.species = Species::Cs;
  } else {
    throw std::runtime_error("registry state '" + st.label +
                             "': species must be 'Rb87' or 'Cs'");
  }

  const std::string orbital = rec.value("orbital", "");
  if (orbital == "p") {
    st.orbital = Orbital::P;
  } else if (orbital == "d") {
    st.orbital = Orbital::D;
  } else if (orbital == "s") {
    st.orbital = Orbital::S;
  } else {
    throw std::runtime_error("registry state '" + st.label +
                             "': orbital must be 'p', 'd' or 's'");
  }

  const double GHz = consts::GHz;
  st.omega10 = require_number(rec, st.label, "omega10_GHz") * GHz;
  st.omegaN1 = require_number(rec, st.label, "omegaN1_GHz") * GHz;
  st.tau = require_number(rec, st.label, "tau_us") * consts::us;
  st.separation = require_number(rec, st.label, "d_um") * consts::um;
  st.bnn = require_number(rec, st.label, "Bnn_GHz") * GHz;
  st.a = require_number(rec, st.label, "a");
  st.b = require_number(rec, st.label, "b");
  st.bPrime = require_number(rec, st.label, "bPrime");
  st.quotedRabi = require_number(rec, st.label, "quotedRabi_MHz") * consts::MHz;
  st.referenceEcb = optional_number(rec, "referenceEcb", 0.0);
  st.notes = rec.value("notes", "");

  if (st.orbital == Orbital::S) {
    st.omegaPrimeN1 =
        require_number(rec, st.label, "omegaPrimeN1_GHz") * GHz;
    st.omegaPrimeN2 =
        require_number(rec, st.label, "omegaPrimeN2_GHz") * GHz;
    st.aPrime = require_number(rec, st.label, "aPrime");
    st.aPP = require_number(rec, st.label, "aPP");
    st.bDoublePrime = require_number(rec, st.label, "bDoublePrime");
    st.bTriplePrime = require_number(rec, st.label, "bTriplePrime");
    st.cPrime = require_number(rec, st.label, "cPrime");
  } else {
    st.omegaN2 = require_number(rec, st.label, "omegaN2_GHz") * GHz;
    st.bDoublePrime = require_number(rec, st.label, "bDoublePrime");
    st.cPrime = 1.0;
  }

  if (st.tau <= 0 || st.bnn <= 0 || st.omega10 <= 0 || st.quotedRabi <= 0)
    throw std::runtime_error("registry state '" + st.label +
                             "': omega10, Bnn, tau and quotedRabi must be positive");

  // Printed a-type ratios come with 0.1 granularity in the worst case and
  // b-type with inconsistent last digits; slacks chosen accordingly.
  constexpr double slackA = 0.05;
  constexpr double slackB = 0.0125;
  check_ratio(st.label, "a", st.a, st.omegaN1 / st.omega10, slackA);
  check_ratio(st.label, "b", st.b, st.bnn / st.omega10, slackB);
  if (st.orbital == Orbital::S) {
    check_ratio(st.label, "aPrime", st.aPrime, st.omegaPrimeN1 / st.omega10,
                slackA);
    check_ratio(st.label, "aPP", st.aPP, st.omegaPrimeN2 / st.omega10, slackA);
  }
  return st;
}

void load_locked(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("registry: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("registry: parse error in '" + path +
                             "': " + e.what());
  }
  if (!doc.contains("states") || !doc["states"].is_array() ||
      doc["states"].empty())
    throw std::runtime_error("registry: '" + path +
                             "' has no non-empty 'states' array");
  std::vector<RydbergStateParams> states;
  for (const auto& rec : doc["states"]) states.push_back(parse_state(rec));
  g_states = std::move(states);
  g_loaded = true;
}

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("RYDSIM_DATA_DIR")) return env;
#ifdef RYDSIM_DEFAULT_DATA_DIR
  return RYDSIM_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

void load_from(const std::string& path) {
  std::lock_guard<std::mutex> lock(g_mutex);
  load_locked(path);
}

const std::vector<RydbergStateParams>& all_states() {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!g_loaded) load_locked(data_dir() + "/rydberg_states.json");
  return g_states;
}

const RydbergStateParams& find_state(const std::string& label) {
  for (const auto& st : all_states())
    if (st.label == label) return st;
  std::string msg = "unknown state label '" + label + "'; known labels:";
  for (const auto& st : all_states()) msg += " " + st.label;
  throw std::invalid_argument(msg);
}

std::vector<std::string> known_labels() {
  std::vector<std::string> out;
  for (const auto& st : all_states()) out.push_back(st.label);
  return out;
}

double RydbergStateParams::blockade_error(double x) const {
  switch (orbital) {
    case Orbital::S:
      return analytic::blockade_error_s(s_params(), x);
    case Orbital::P:
      if (a > 1.0) return analytic::blockade_error_p_low(a, b, bPrime, x);
      return analytic::blockade_error_p_high(a, omegaN2 / omega10, b, bPrime,
                                             bDoublePrime, x);
    case Orbital::D:
      return analytic::blockade_error_p_low(a, b, bPrime, x);
  }
  return 0;
}

double RydbergStateParams::cb_mu() const {
  switch (orbital) {
    case Orbital::S:
      return analytic::blockade_error_s(s_params(), 1.0);
    case Orbital::P:
      return analytic::blockade_error_p_low_literal(a, b, bPrime, 1.0);
    case Orbital::D:
      return analytic::blockade_error_p_low(a, b, bPrime, 1.0);
  }
  return 0;
}

analytic::SStateParams RydbergStateParams::s_params() const {
  if (orbital != Orbital::S)
    throw std::logic_error("s_params: '" + label + "' is not an s state");
  analytic::SStateParams p;
  p.a = a;
  p.aPP = aPP;
  p.b = b;
  p.bPrime = bPrime;
  p.bTriplePrime = bTriplePrime;
  p.cPrime = cPrime;
  return p;
}

std::array<double, 3> RydbergStateParams::ground_branching() const {
  if (species == Species::Rb87) return {1.0 / 8, 3.0 / 4, 1.0 / 8};
  return {1.0 / 16, 7.0 / 8, 1.0 / 16};
}

AtomScheme6 scheme6_for(const RydbergStateParams& st, double omega) {
  AtomScheme6 s;
  s.omega10 = st.omega10;
  if (st.orbital == Orbital::S) {
    // |r1> = neighbouring s level, |r2> = the near d channel with the
    // enhanced coupling.
    s.rabi = {cplx(omega, 0), cplx(omega, 0), cplx(st.cPrime * omega, 0)};
    s.omegaRR1 = st.omegaN1;
    s.omegaRR2 = st.omegaPrimeN2;
  } else {
    s.rabi = {cplx(omega, 0), cplx(omega, 0), cplx(omega, 0)};
    s.omegaRR1 = st.omegaN1;
    s.omegaRR2 = st.omegaN2;
  }
  s.gammaR = 1.0 / st.tau;
  s.groundBranching = st.ground_branching();
  return s;
}

BlockadeSpec blockade3_for(const RydbergStateParams& st) {
  // Matrix over the Rydberg sub-basis {r2, r1, r}; index 2 is the target
  // level |r>.
  RMatrix m = RMatrix::Constant(3, 3, st.bnn);
  m(2, 1) = m(1, 2) = st.bPrime * st.bnn;
  if (st.orbital == Orbital::S) {
    m(2, 0) = m(0, 2) = st.bTriplePrime * st.bnn;
    m(1, 0) = m(0, 1) = st.bDoublePrime * st.bnn;
  } else {
    m(2, 0) = m(0, 2) = st.bDoublePrime * st.bnn;
  }
  return BlockadeSpec::matrix3(m);
}

}  // namespace rydsim::registry
