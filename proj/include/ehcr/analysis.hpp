#pragma once

#include <vector>

#include "ehcr/battery.hpp"
#include "ehcr/model.hpp"
#include "ehcr/policy.hpp"
#include "ehcr/probing.hpp"
#include "ehcr/rate.hpp"
#include "ehcr/sensing.hpp"

namespace ehcr {

// Every analytic quantity for one SU at one policy point.
struct SuAnalysis {
  PolicyParams params;
  SensingStats sensing;
  EstimationStats estimation;
  GainDistribution gain;
  std::vector<double> harvest; // over {0..K+alpha_t}, tail in the last cell
  PolicyPmf pmf;
  BatteryChain chain;
  RatePart rate;
  double interference = 0.0;        // watts, this SU's AIC term
  double transmission_outage = 0.0;
};

SuAnalysis analyze_su(const Model& model, std::size_t su, const PolicyParams& params,
                      const SteadyStateOptions& options = {});

// The rate and interference figures only, for search loops.
struct PointValue {
  double rate = 0.0;
  double interference = 0.0;
};

PointValue evaluate_point(const Model& model, std::size_t su, const PolicyParams& params);

struct NetworkAnalysis {
  std::vector<SuAnalysis> users;
  RateBreakdown totals;
};

NetworkAnalysis analyze_network(const Model& model, const std::vector<PolicyParams>& params,
                                const SteadyStateOptions& options = {});

// Sum of per-SU interference terms compared against the cap.
double aic_lhs(const std::vector<double>& contributions);

} // namespace ehcr
