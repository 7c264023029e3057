#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ehcr/policy.hpp"
#include "ehcr/sensing.hpp"

namespace ehcr {

// Raised when the battery chain has no unique stationary distribution.
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column-stochastic transition matrix: entry (i, j) = P(next = i | current = j).
// The data-spend branch of a sensed-idle slot uses the idle-hypothesis pmf psi^0.
// `harvest` must cover {0..K+alpha_t} (tail in the last cell): a slot that starts below
// alpha_t can need P(h = K) exactly, which a pmf truncated at K no longer holds.
Eigen::MatrixXd build_transition_matrix(const PolicyPmf& pmf, const SensingStats& sensing,
                                        std::span<const double> harvest);

struct SteadyStateOptions {
  // Cross-check the direct solve against repeated squaring of the matrix.
  bool verify = true;
  double tolerance = 1e-6;
  std::string context; // appended to error messages
};

// Stationary vector from (Phi - I + 1 1^T) zeta = 1.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition, const SteadyStateOptions& options = {});

// Independent route: Phi^(2^m) until its columns agree, then a few plain Phi*zeta sweeps.
Eigen::VectorXd power_iteration(const Eigen::MatrixXd& transition, int max_squarings = 64);

double battery_outage(const Eigen::VectorXd& zeta, int probe_cells);
double avg_energy(const Eigen::VectorXd& zeta);

struct BatteryChain {
  Eigen::MatrixXd transition;
  Eigen::VectorXd steady_state;
  double avg_energy = 0.0;
  double battery_outage = 0.0;
};

BatteryChain solve_chain(const PolicyPmf& pmf, const SensingStats& sensing, std::span<const double> harvest,
                         const SteadyStateOptions& options = {});

} // namespace ehcr
