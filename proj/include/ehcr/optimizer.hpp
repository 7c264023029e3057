#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehcr/analysis.hpp"
#include "ehcr/model.hpp"

namespace ehcr {

struct SearchConfig {
  int grid_omega = 21;
  int grid_theta = 25;
  double theta_min = 1e-3;
  double theta_max_factor = 10.0; // upper theta bound = factor * largest var_hat
  int refine_levels = 3;
  int max_sweeps = 50;
  double tolerance = 1e-6;        // relative improvement that ends the sweeps
  int lagrange_points = 24;       // multiplier values tried as starting points
  // Extra joint starting points (one PolicyParams per SU each), e.g. a previous optimum.
  std::vector<std::vector<PolicyParams>> warm_starts;
  bool keep_trajectory = false;
};

struct SearchDiagnostics {
  std::size_t evaluations = 0;
  std::size_t failed_evaluations = 0; // points whose chain could not be solved
  int grid_omega = 0;
  int grid_theta = 0;
  int refine_levels = 0;
  int sweeps = 0;
  int starts = 0;
  double omega_step = 0.0;     // finest spacing reached in omega
  double log_theta_step = 0.0; // finest spacing reached in ln(theta)
  std::vector<double> trajectory; // incumbent objective after each improvement
};

struct OptimizationResult {
  std::vector<PolicyParams> params;
  std::vector<PointValue> per_su;
  double rate = 0.0; // sum of R_LB, bits/s
  double aic = 0.0;  // watts
  bool feasible = false;
  SearchDiagnostics diagnostics;
};

// Largest var_hat over hypotheses and SUs; the theta grid scales with it.
double largest_gain_mean(const Model& model);

std::vector<double> omega_grid(int points);
std::vector<double> theta_grid(const Model& model, const SearchConfig& search);

struct Surface {
  std::vector<double> omegas;
  std::vector<double> thetas;
  Eigen::MatrixXd rate;         // rows: omega, cols: theta
  Eigen::MatrixXd interference; // NaN where the chain failed
};

Surface objective_surface(const Model& model, std::size_t su, const std::vector<double>& omegas,
                          const std::vector<double>& thetas);

OptimizationResult solve_p1(const Model& model, const SearchConfig& search = {});

} // namespace ehcr
