#include "ehcr/analysis.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace ehcr {

SuAnalysis analyze_su(const Model& model, std::size_t su, const PolicyParams& params,
                      const SteadyStateOptions& options) {
  if (su >= model.profiles.size()) throw std::out_of_range("analyze_su: SU index out of range");
  const auto& profile = model.profiles[su];
  const auto& cfg = model.config;
  SuAnalysis a;
  a.params = params;
  a.sensing = sensing_stats(model, profile);
  a.estimation = estimator_variances(model, profile, a.sensing);
  a.gain = GainDistribution::from(a.sensing, a.estimation);
  a.harvest = harvest_pmf(profile.harvest_rate, cfg.battery_cells + cfg.probe_cells);
  a.pmf = policy_pmf(params, cfg.probe_cells, cfg.battery_cells, a.gain);

  SteadyStateOptions opts = options;
  if (opts.context.empty()) {
    opts.context = fmt::format("su.{}: K={}, rho={}, omega={}, theta={}", su + 1, cfg.battery_cells,
                               profile.harvest_rate, params.omega, params.theta);
  }
  a.chain = solve_chain(a.pmf, a.sensing, a.harvest, opts);
  a.rate = rate_lower_bound(model, profile, a.chain.steady_state, a.pmf, a.estimation, a.sensing);
  a.interference = interference_contribution(model, profile, a.chain.steady_state, a.pmf, a.sensing);
  a.transmission_outage = transmission_outage(a.chain.steady_state, a.pmf, a.sensing);
  return a;
}

PointValue evaluate_point(const Model& model, std::size_t su, const PolicyParams& params) {
  SteadyStateOptions opts;
  opts.verify = false;
  const auto a = analyze_su(model, su, params, opts);
  return {a.rate.total, a.interference};
}

double aic_lhs(const std::vector<double>& contributions) { return compensated_sum(contributions); }

NetworkAnalysis analyze_network(const Model& model, const std::vector<PolicyParams>& params,
                                const SteadyStateOptions& options) {
  if (params.size() != model.profiles.size()) {
    throw std::invalid_argument(fmt::format("analyze_network: {} policy points for {} SUs", params.size(),
                                            model.profiles.size()));
  }
  NetworkAnalysis out;
  out.users.reserve(params.size());
  for (std::size_t n = 0; n < params.size(); ++n) {
    out.users.push_back(analyze_su(model, n, params[n], options));
    const auto& u = out.users.back();
    out.totals.su_rate.push_back(u.rate.total);
    out.totals.su_rate_by_hypothesis.push_back(u.rate.by_hypothesis);
    out.totals.su_interference.push_back(u.interference);
  }
  out.totals.sum_rate = compensated_sum(out.totals.su_rate);
  out.totals.aic_lhs = aic_lhs(out.totals.su_interference);
  out.totals.aic_satisfied = out.totals.aic_lhs <= model.config.interference_cap;
  return out;
}

} // namespace ehcr
