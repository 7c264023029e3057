#pragma once

#include <array>
#include <vector>

#include "ehcr/model.hpp"
#include "ehcr/probing.hpp"

namespace ehcr {

// floor(x) with a small upward nudge so that products such as k*omega that are
// integral in exact arithmetic floor to that integer.
int nudged_floor(double x);

// Highest spend level reachable from battery state k: floor(k*omega) - alpha_t (may be <= 0).
int top_level(int k, double omega, int probe_cells);

// Energy units spent on data in a slot that starts in state k with fed-back gain g_hat.
int alpha(int k, double g_hat, const PolicyParams& params, int probe_cells);

// Gain interval [lower, upper) on which the policy spends exactly `level` units.
struct Breakpoint {
  int level = 0;
  double lower = 0.0;
  double upper = 0.0;
};

// Intervals for levels 1..top_level(k); empty when k cannot spend anything.
std::vector<Breakpoint> breakpoints(int k, const PolicyParams& params, int probe_cells);

// psi[e](k, i) = P(alpha_k = i | H_e), plus the breakpoint tables shared by both hypotheses.
class PolicyPmf {
 public:
  PolicyPmf() = default;
  PolicyPmf(int cells, int probe_cells);

  int cells() const { return cells_; }
  int probe_cells() const { return probe_cells_; }

  double psi(int hypothesis, int k, int i) const { return psi_[hypothesis][index(k, i)]; }
  double& psi(int hypothesis, int k, int i) { return psi_[hypothesis][index(k, i)]; }

  // Probability of spending nothing from state k (Y_k).
  double idle_probability(int hypothesis, int k) const { return psi(hypothesis, k, 0); }

  const std::vector<Breakpoint>& levels(int k) const { return levels_[static_cast<std::size_t>(k)]; }
  std::vector<Breakpoint>& levels(int k) { return levels_[static_cast<std::size_t>(k)]; }

 private:
  std::size_t index(int k, int i) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(cells_ + 1) + static_cast<std::size_t>(i);
  }

  int cells_ = 0;
  int probe_cells_ = 0;
  std::array<std::vector<double>, 2> psi_;
  std::vector<std::vector<Breakpoint>> levels_;
};

PolicyPmf policy_pmf(const PolicyParams& params, int probe_cells, int cells, const GainDistribution& dist);

} // namespace ehcr
