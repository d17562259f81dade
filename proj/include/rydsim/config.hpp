#pragma once

// JSON experiment configuration: a single document with the sections
// {trap, beams, magnetic, blockade, gate, run}. Quoted values follow one
// unit convention throughout — frequencies in MHz (multiplied by 2pi on
// load), lengths in um, temperatures in uK, times in ns, magnetic fields in
// uT — and every key name carries its unit suffix.
//
// Loading is strict: missing required keys, wrong value types, and unknown
// keys are all reported with the full section.key path. The loader also
// returns an FNV-1a digest of the canonical (key-sorted) document, so the
// digest is stable under key re-ordering of the file.

#include <stdexcept>
#include <string>

#include "rydsim/experiments.hpp"

namespace rydsim::config {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Invalid or unreadable configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  ExperimentConfig experiment;
  std::string digest;      ///< "fnv1a:" + 16 hex digits of the canonical JSON
  std::string sourcePath;  ///< as passed to load_file (empty for parse)
};

/// Parse a configuration document. `baseDir` resolves relative file
/// references inside the document (the tabulated blockade curve); pass the
/// directory containing the config file. Throws ConfigError naming the
/// offending key.
LoadedConfig parse(const std::string& text, const std::string& baseDir);

/// Read and parse a configuration file. Throws ConfigError on I/O, parse,
/// or validation errors.
LoadedConfig load_file(const std::string& path);

/// 64-bit FNV-1a digest of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rydsim::config
