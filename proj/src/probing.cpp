#include "ehcr/probing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ehcr {

namespace {

// 53 random bits mapped to [0,1).
double uniform01(RngStream& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

EstimationStats estimator_variances(double channel_var, double training_energy, double ap_noise,
                                    double pu_interference_var, double omega0, double omega1) {
  const double signal = channel_var * training_energy;
  const double denom = signal + ap_noise + omega1 * pu_interference_var;
  const double scale = channel_var * channel_var * training_energy / (denom * denom);
  EstimationStats est;
  est.pu_interference_var = pu_interference_var;
  // Under H1 with weak training and strong PU leakage the closed form can exceed the prior
  // variance; the estimate can never carry more energy than the channel itself.
  est.var_hat[0] = std::min(channel_var, scale * (signal + ap_noise));
  est.var_hat[1] = std::min(channel_var, scale * (signal + ap_noise + pu_interference_var));
  for (int e = 0; e < 2; ++e) est.var_err[e] = channel_var - est.var_hat[e];
  est.var_hat_mixed = omega0 * est.var_hat[0] + omega1 * est.var_hat[1];
  est.var_err_mixed = omega0 * est.var_err[0] + omega1 * est.var_err[1];
  return est;
}

EstimationStats estimator_variances(const Model& model, const SuProfile& profile, const SensingStats& sensing) {
  return estimator_variances(profile.su_ap_var, model.derived.training_energy, profile.ap_noise,
                             model.derived.pu_interference_var, sensing.omega0, sensing.omega1);
}

GainDistribution GainDistribution::from(const SensingStats& sensing, const EstimationStats& est) {
  GainDistribution d;
  d.weight = {sensing.omega0, sensing.omega1};
  d.mean = est.var_hat;
  return d;
}

double exponential_cdf(double x, double mean) {
  if (x < 0.0) return 0.0;
  if (!(mean > 0.0)) return 1.0;
  if (std::isinf(x)) return 1.0;
  return -std::expm1(-x / mean);
}

double exponential_sf(double x, double mean) {
  if (x < 0.0) return 1.0;
  if (!(mean > 0.0) || std::isinf(x)) return 0.0;
  return std::exp(-x / mean);
}

double gain_cdf(const GainDistribution& dist, double x, Hypothesis hypothesis) {
  switch (hypothesis) {
    case Hypothesis::Idle: return exponential_cdf(x, dist.mean[0]);
    case Hypothesis::Busy: return exponential_cdf(x, dist.mean[1]);
    case Hypothesis::Mixed:
      return dist.weight[0] * exponential_cdf(x, dist.mean[0]) + dist.weight[1] * exponential_cdf(x, dist.mean[1]);
  }
  return 0.0;
}

double sample_gain(const GainDistribution& dist, Hypothesis hypothesis, RngStream& rng) {
  int component = static_cast<int>(hypothesis);
  if (hypothesis == Hypothesis::Mixed) {
    const double u = uniform01(rng);
    component = u < dist.weight[0] ? 0 : 1;
  }
  const double mean = dist.mean[component];
  if (!(mean > 0.0)) return 0.0;
  const double u = uniform01(rng);
  return -mean * std::log1p(-u);
}

} // namespace ehcr
