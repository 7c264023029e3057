#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ehcr {

// Global slot, battery and sensing constants shared by every secondary user.
// All quantities are SI (seconds, hertz, joules, watts).
struct SystemConfig {
  double slot_duration = 10e-3;      // Tf
  double sensing_duration = 1e-3;    // tau_s
  double probing_duration = 0.1e-3;  // tau_t
  double sampling_frequency = 100e3; // fs
  double bandwidth = 10e3;           // W
  double energy_unit = 0.01;         // e_u, joules per battery cell
  int battery_cells = 80;            // K
  int probe_cells = 1;               // alpha_t
  double prior_idle = 0.7;           // pi_0
  double target_detection = 0.85;    // target P_d
  double pu_power = 1.0;             // P_p
  double pu_ap_channel_var = 1.0;    // delta_q
  double interference_cap = 1e300;   // I_av, watts
  bool ideal_sensing = false;        // force P_fa = 0, P_d = 1
};

// Per-SU channel statistics and harvesting intensity.
struct SuProfile {
  double su_ap_var = 2.0;     // gamma_n
  double pu_su_var = 1.0;     // delta_u
  double su_pu_var = 1.0;     // delta_z
  double sensing_noise = 1.0; // sigma_w^2
  double ap_noise = 1.0;      // sigma_v^2
  double harvest_rate = 15.0; // rho, packets per slot
};

// Power-policy parameters (the optimization variables).
struct PolicyParams {
  double omega = 0.0;
  double theta = 0.0;
};

// Quantities that follow from SystemConfig alone.
struct DerivedConstants {
  double data_duration = 0.0;  // tau_d
  long sensing_samples = 0;    // N_s
  long training_symbols = 0;   // N_t
  long data_symbols = 0;       // N_d
  double unit_power = 0.0;     // p_u = e_u / tau_d
  double training_power = 0.0; // P_t = alpha_t e_u / tau_t
  double training_energy = 0.0; // P_t N_t, taken as alpha_t e_u fs
  double data_fraction = 0.0;  // D_d
  double training_fraction = 0.0; // D_t
  double prior_busy = 0.0;     // pi_1
  double pu_interference_var = 0.0; // sigma_p^2 = P_p delta_q
};

// A configuration that passed validation, with every derived constant filled in.
// Immutable by convention; copy freely.
struct Model {
  SystemConfig config;
  DerivedConstants derived;
  std::vector<SuProfile> profiles;
  std::vector<std::string> warnings;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

DerivedConstants derive_constants(const SystemConfig& config);

// Returns every violated invariant (empty if the inputs are valid).
std::vector<std::string> check(const SystemConfig& config, const std::vector<SuProfile>& profiles);

// Throws ValidationError listing all violations.
Model validate(const SystemConfig& config, const std::vector<SuProfile>& profiles);

// Truncated Poisson pmf over {0..K}; the last cell absorbs the tail.
std::vector<double> harvest_pmf(double rho, int cells);

} // namespace ehcr
