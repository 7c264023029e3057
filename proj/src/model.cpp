#include "ehcr/model.hpp"

#include <cmath>
#include <fmt/format.h>

namespace ehcr {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& s : issues) {
    out += "\n  - ";
    out += s;
  }
  return out;
}

bool open_unit(double p) { return p > 0.0 && p < 1.0; }

void sample_count_warning(std::vector<std::string>& warnings, const char* name, double exact) {
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 1e-6 * std::max(1.0, std::abs(exact))) {
    warnings.push_back(fmt::format("{} = {:.6g} samples is not integral; rounded to {}", name, exact,
                                   rounded));
  }
  if (rounded < 1.0) {
    warnings.push_back(fmt::format("{} rounds to {} samples", name, rounded));
  }
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

DerivedConstants derive_constants(const SystemConfig& c) {
  DerivedConstants d;
  d.data_duration = c.slot_duration - c.sensing_duration - c.probing_duration;
  d.sensing_samples = std::lround(c.sensing_duration * c.sampling_frequency);
  d.training_symbols = std::lround(c.probing_duration * c.sampling_frequency);
  d.data_symbols = std::lround(d.data_duration * c.sampling_frequency);
  d.unit_power = c.energy_unit / d.data_duration;
  d.training_power = c.probe_cells * c.energy_unit / c.probing_duration;
  d.training_energy = c.probe_cells * c.energy_unit * c.sampling_frequency;
  d.data_fraction = d.data_duration / c.slot_duration;
  d.training_fraction = c.probing_duration / c.slot_duration;
  d.prior_busy = 1.0 - c.prior_idle;
  d.pu_interference_var = c.pu_power * c.pu_ap_channel_var;
  return d;
}

std::vector<std::string> check(const SystemConfig& c, const std::vector<SuProfile>& profiles) {
  std::vector<std::string> issues;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) issues.push_back(fmt::format("{} must be > 0 (got {})", name, v));
  };
  positive(c.slot_duration, "slot_duration");
  positive(c.sensing_duration, "sensing_duration");
  positive(c.probing_duration, "probing_duration");
  positive(c.sampling_frequency, "sampling_frequency");
  positive(c.bandwidth, "bandwidth");
  positive(c.energy_unit, "energy_unit");
  if (!(c.slot_duration - c.sensing_duration - c.probing_duration > 0.0)) {
    issues.push_back(fmt::format("data duration τd ≤ 0: sensing ({}) + probing ({}) must be < slot ({})",
                                 c.sensing_duration, c.probing_duration, c.slot_duration));
  }
  if (c.battery_cells < 1) issues.push_back(fmt::format("battery_cells must be >= 1 (got {})", c.battery_cells));
  if (c.probe_cells < 0 || c.probe_cells >= c.battery_cells) {
    issues.push_back(fmt::format("probe_cells must satisfy 0 <= αt < K (got αt={}, K={})", c.probe_cells,
                                 c.battery_cells));
  }
  if (!open_unit(c.prior_idle)) issues.push_back(fmt::format("prior_idle must lie in (0,1) (got {})", c.prior_idle));
  if (!open_unit(c.target_detection)) {
    issues.push_back(fmt::format("target_detection must lie in (0,1) (got {})", c.target_detection));
  }
  if (!(c.pu_power >= 0.0)) issues.push_back(fmt::format("pu_power must be >= 0 (got {})", c.pu_power));
  if (!(c.pu_ap_channel_var >= 0.0)) {
    issues.push_back(fmt::format("pu_ap_channel_var must be >= 0 (got {})", c.pu_ap_channel_var));
  }
  if (!(c.interference_cap >= 0.0)) {
    issues.push_back(fmt::format("interference_cap must be >= 0 (got {})", c.interference_cap));
  }
  if (profiles.empty()) issues.emplace_back("at least one SU profile is required");
  for (std::size_t n = 0; n < profiles.size(); ++n) {
    const auto& p = profiles[n];
    auto su_positive = [&](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        issues.push_back(fmt::format("su.{}: {} must be > 0 (got {})", n + 1, name, v));
      }
    };
    su_positive(p.su_ap_var, "su_ap_var");
    su_positive(p.pu_su_var, "pu_su_var");
    su_positive(p.su_pu_var, "su_pu_var");
    su_positive(p.sensing_noise, "sensing_noise");
    su_positive(p.ap_noise, "ap_noise");
    su_positive(p.harvest_rate, "harvest_rate");
  }
  return issues;
}

Model validate(const SystemConfig& config, const std::vector<SuProfile>& profiles) {
  auto issues = check(config, profiles);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  Model m;
  m.config = config;
  m.derived = derive_constants(config);
  m.profiles = profiles;
  sample_count_warning(m.warnings, "N_s", config.sensing_duration * config.sampling_frequency);
  sample_count_warning(m.warnings, "N_t", config.probing_duration * config.sampling_frequency);
  return m;
}

std::vector<double> harvest_pmf(double rho, int cells) {
  if (!(rho >= 0.0) || cells < 1) throw std::invalid_argument("harvest_pmf: need rho >= 0 and K >= 1");
  std::vector<double> pmf(static_cast<std::size_t>(cells) + 1, 0.0);
  if (rho == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  const double log_rho = std::log(rho);
  // Kahan sum of the head so the tail cell is as exact as the head allows.
  double sum = 0.0, carry = 0.0;
  for (int r = 0; r < cells; ++r) {
    const double p = std::exp(-rho + r * log_rho - std::lgamma(r + 1.0));
    pmf[r] = p;
    const double y = p - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  pmf[cells] = std::max(0.0, 1.0 - sum);
  return pmf;
}

} // namespace ehcr
