#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ehcr/config_io.hpp"

namespace ehcr {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitValidation = 2, kExitInfeasible = 3, kExitOracle = 4 };

inline constexpr const char* kToolVersion = "0.1.0";

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  long slots = 100000;
  std::string axis;
  double from = 0.0;
  double to = 0.0;
  int points = 11;
  std::optional<int> grid_omega;
  std::optional<int> grid_theta;
  std::optional<int> refine;
  std::optional<int> max_sweeps;
  bool dump_matrix = false;
  bool dump_trace = false;
  bool ideal_sensing = false;
};

// Axis names accepted by the sweep command, in help order.
const std::vector<std::string>& sweep_axes();

// Sets `axis` to `value` in every place it appears (all SUs for per-SU keys).
void apply_axis(RunConfig& config, const std::string& axis, double value);

// Evenly spaced points from..to inclusive.
std::vector<double> axis_values(double from, double to, int points);

// Runs one subcommand (analyze, optimize, simulate, sweep). Diagnostics go to `err`,
// the human summary to `out`; files land in options.out. Returns an ExitCode.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err);

} // namespace ehcr
