#include "ehcr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ehcr {

namespace {

constexpr double kFloorNudge = 1e-9;
constexpr double kDenominatorEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// theta*k*omega / denominator, or +inf once the denominator is (numerically) non-positive.
double threshold_gain(double numerator, double denominator) {
  if (denominator <= kDenominatorEps) return kInf;
  return numerator / denominator;
}

} // namespace

int nudged_floor(double x) { return static_cast<int>(std::floor(x + kFloorNudge)); }

int top_level(int k, double omega, int probe_cells) { return nudged_floor(k * omega) - probe_cells; }

int alpha(int k, double g_hat, const PolicyParams& params, int probe_cells) {
  double factor = 1.0;
  if (params.theta > 0.0) factor = g_hat > params.theta ? 1.0 - params.theta / g_hat : 0.0;
  const int spend = nudged_floor(params.omega * k * factor) - probe_cells;
  return std::max(spend, 0);
}

std::vector<Breakpoint> breakpoints(int k, const PolicyParams& params, int probe_cells) {
  std::vector<Breakpoint> out;
  const int top = top_level(k, params.omega, probe_cells);
  if (k <= probe_cells || top < 1) return out;
  const double scaled = k * params.omega;
  const double numerator = params.theta * scaled;
  out.reserve(static_cast<std::size_t>(top));
  if (params.theta == 0.0) {
    // No cut-off: every gain spends the top level.
    for (int i = 1; i <= top; ++i) out.push_back({i, i == top ? 0.0 : kInf, kInf});
    return out;
  }
  for (int i = 1; i <= top; ++i) {
    const double lower_den = scaled - probe_cells - i;
    Breakpoint bp;
    bp.level = i;
    bp.lower = threshold_gain(numerator, lower_den);
    bp.upper = threshold_gain(numerator, lower_den - 1.0);
    out.push_back(bp);
  }
  return out;
}

PolicyPmf::PolicyPmf(int cells, int probe_cells)
    : cells_(cells), probe_cells_(probe_cells), levels_(static_cast<std::size_t>(cells) + 1) {
  const auto n = static_cast<std::size_t>(cells + 1) * static_cast<std::size_t>(cells + 1);
  psi_[0].assign(n, 0.0);
  psi_[1].assign(n, 0.0);
}

PolicyPmf policy_pmf(const PolicyParams& params, int probe_cells, int cells, const GainDistribution& dist) {
  PolicyPmf pmf(cells, probe_cells);
  for (int k = 0; k <= cells; ++k) {
    auto levels = breakpoints(k, params, probe_cells);
    for (int e = 0; e < 2; ++e) {
      double spent_mass = 0.0;
      for (const auto& bp : levels) {
        double q = 0.0;
        if (bp.lower < bp.upper) {
          q = exponential_sf(bp.lower, dist.mean[e]) - exponential_sf(bp.upper, dist.mean[e]);
          q = std::max(q, 0.0);
        }
        pmf.psi(e, k, bp.level) = q;
        spent_mass += q;
      }
      // Y_k: whatever mass does not reach level 1.
      pmf.psi(e, k, 0) = std::max(0.0, 1.0 - spent_mass);
    }
    pmf.levels(k) = std::move(levels);
  }
  return pmf;
}

} // namespace ehcr
