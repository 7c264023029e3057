#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ehcr/model.hpp"

namespace fixtures {

// Table 2 system, one SU with gamma = 2, delta_u = delta_z = 1, rho = 15.
inline ehcr::Model table2(double fs = 100e3, int cells = 80) {
  ehcr::SystemConfig c;
  c.sampling_frequency = fs;
  c.battery_cells = cells;
  return ehcr::validate(c, {ehcr::SuProfile{}});
}

// A random but valid single-SU configuration with K <= max_cells.
struct RandomCase {
  ehcr::Model model;
  ehcr::PolicyParams params;
};

inline RandomCase random_case(std::mt19937_64& rng, int max_cells = 100) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ehcr::SystemConfig c;
  c.battery_cells = 2 + static_cast<int>(u(rng) * (max_cells - 1));
  c.probe_cells = static_cast<int>(u(rng) * std::min(6, c.battery_cells - 1));
  c.sampling_frequency = std::pow(10.0, 4.0 + u(rng) * 2.0);
  c.sensing_duration = 0.2e-3 + u(rng) * 2e-3;
  c.prior_idle = 0.1 + 0.8 * u(rng);
  c.target_detection = 0.6 + 0.35 * u(rng);
  c.ideal_sensing = u(rng) < 0.1;
  ehcr::SuProfile p;
  p.su_ap_var = 0.2 + 3.0 * u(rng);
  p.pu_su_var = 0.2 + 2.0 * u(rng);
  p.su_pu_var = 0.2 + 2.0 * u(rng);
  p.sensing_noise = 0.5 + 5.0 * u(rng);
  p.ap_noise = 0.5 + 5.0 * u(rng);
  p.harvest_rate = 0.5 + 0.5 * c.battery_cells * u(rng);
  ehcr::PolicyParams params{u(rng), u(rng) < 0.1 ? 0.0 : 2.0 * u(rng)};
  return {ehcr::validate(c, {p}), params};
}

} // namespace fixtures
