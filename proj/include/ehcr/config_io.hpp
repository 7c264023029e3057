#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehcr/model.hpp"
#include "ehcr/optimizer.hpp"

namespace ehcr {

// Everything a config file can set.
struct RunConfig {
  SystemConfig system;
  std::vector<SuProfile> profiles;
  std::vector<PolicyParams> policies; // one per SU; defaults when the file omits them
  SearchConfig search;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Sectioned key = value text:
//   [system]   slot_duration, sensing_duration, ..., interference_cap (inf allowed), ideal_sensing
//   [su.N]     su_ap_var, pu_su_var, su_pu_var, sensing_noise, ap_noise, harvest_rate, omega, theta
//   [search]   grid_omega, grid_theta, theta_min, theta_max_factor, refine, max_sweeps, tolerance
// '#' starts a comment. SU sections must be numbered 1..N. Errors carry "source:line:".
RunConfig parse_config(std::string_view text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

// Inverse of parse_config; round-trips exactly.
std::string format_config(const RunConfig& config);

// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);

} // namespace ehcr
