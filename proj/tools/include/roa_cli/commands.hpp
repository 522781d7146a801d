#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "roa_cli/config.hpp"

namespace roa::cli {

/// Files produced by a command, keyed by name relative to the output
/// directory. Commands compute everything in memory; nothing touches the
/// disk until the result is complete.
struct Outputs {
  std::map<std::string, std::string> files;
  /// Human-readable one-line summary printed on success.
  std::string summary;
};

Outputs cmd_simulate(const RunConfig& cfg);
Outputs cmd_scan(const RunConfig& cfg);
Outputs cmd_spectrum(const RunConfig& cfg);
Outputs cmd_orbit(const RunConfig& cfg);
Outputs cmd_basin(const RunConfig& cfg);
/// Runs a figure/example preset on top of `cfg` (which normally comes from
/// preset(name) plus overrides).
Outputs cmd_reproduce(const std::string& name, const RunConfig& cfg);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Full command-line entry point: parses arguments, loads and overrides the
/// config, runs the subcommand, writes outputs plus manifest.json and
/// config.json into the output directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roa::cli
