#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "latgibbs/inference.hpp"
#include "latgibbs/sampler.hpp"
#include "latgibbs/spin_system.hpp"

namespace latgibbs {

enum class Subcommand { sample, marginal, probe_wsm, check_oracle, stats };

/// Fully resolved run configuration. CLI flags override config-file values;
/// defaults are documented in --help and echoed in every output header.
struct RunConfig {
  std::string model;  // "potts" or "ising"
  int q = 2;
  double beta = 0.0;
  double h = 1.0;
  int mesh_l = 2;
  Strategy strategy = Strategy::exact_min;
  std::array<std::int32_t, 4> window{0, 0, 0, 0};  // x0, y0, x1, y1 inclusive
  std::uint64_t seed = 0;
  int samples = 1;
  std::int64_t budget = 10'000'000;
  std::int64_t enum_cap = std::int64_t{1} << 26;
  std::int64_t transfer_cap = std::int64_t{1} << 16;
  std::int64_t joint_cap = std::int64_t{1} << 24;
  std::string out = "-";
  std::vector<int> ells = {2, 3, 4, 5};

  InferenceCaps caps() const {
    return InferenceCaps{enum_cap, transfer_cap, joint_cap};
  }
};

struct Invocation {
  Subcommand cmd;
  RunConfig config;
};

/// Thrown when --help output was requested.
struct HelpRequested {
  std::string text;
};

/// Parses command-line arguments (without the program name), resolving any
/// --config file with flag-over-file precedence. Unknown flags or file keys
/// are rejected. Throws ConfigError on invalid input.
Invocation parse_config(const std::vector<std::string>& args);

/// Parses whitespace-separated key=value pairs onto a default configuration
/// and validates it (the config-file syntax).
RunConfig parse_config_text(const std::string& text);

/// The spin system described by the configuration.
SpinSystem build_system(const RunConfig& config);

/// Runs the subcommand, writing its output file (or stdout for "-") and any
/// diagnostics to the given stream. Returns the process exit code:
/// 0 success, 1 check failure, 2 config error, 3 budget abort, 4 cap exceeded.
int execute(const Invocation& invocation, std::ostream& diagnostics);

int cli_main(int argc, char** argv);

}  // namespace latgibbs
