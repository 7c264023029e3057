#include "ehcr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ehcr {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Acklam's rational approximation of the standard normal quantile (|rel err| < 1.2e-9).
double normal_quantile_approx(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    if (p == 1.0) return -std::numeric_limits<double>::infinity();
    throw std::domain_error("q_inverse: p must lie in [0,1]");
  }
  // Q^{-1}(p) = Phi^{-1}(1-p) = -Phi^{-1}(p)
  double x = -normal_quantile_approx(p);
  // Newton refinement on Q(x) - p; Q'(x) = -phi(x).
  for (int it = 0; it < 2; ++it) {
    const double err = q_function(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf == 0.0) break;
    x += err / pdf;
  }
  return x;
}

DetectorProbabilities detector_probabilities(double threshold, double snr, long samples, double noise_power) {
  if (!(threshold > 0.0)) throw std::domain_error("detector_probabilities: threshold must be > 0");
  const double n = static_cast<double>(samples);
  const double ratio = threshold / noise_power;
  DetectorProbabilities out;
  out.p_fa = clamp01(q_function((ratio - 1.0) * std::sqrt(n)));
  out.p_d = clamp01(q_function((ratio - snr - 1.0) * std::sqrt(n / (2.0 * snr + 1.0))));
  return out;
}

double false_alarm_at_target_pd(double snr, long samples, double target_pd) {
  const double arg = std::sqrt(2.0 * snr + 1.0) * q_inverse(target_pd) + snr * std::sqrt(static_cast<double>(samples));
  return clamp01(q_function(arg));
}

SensingStats sensing_from_detector(double prior_idle, double p_fa, double p_d, double snr) {
  SensingStats s;
  s.snr = snr;
  s.p_fa = clamp01(p_fa);
  s.p_d = clamp01(p_d);
  s.beta0 = prior_idle * (1.0 - s.p_fa);
  s.beta1 = (1.0 - prior_idle) * (1.0 - s.p_d);
  s.pi_hat_idle = s.beta0 + s.beta1;
  s.pi_hat_busy = 1.0 - s.pi_hat_idle;
  if (s.pi_hat_idle > 0.0) {
    s.omega0 = s.beta0 / s.pi_hat_idle;
    s.omega1 = s.beta1 / s.pi_hat_idle;
  } else {
    // never sensed idle; conditional weights are unused, pick the idle component
    s.omega0 = 1.0;
    s.omega1 = 0.0;
  }
  return s;
}

SensingStats sensing_stats(const Model& model, const SuProfile& profile) {
  const auto& c = model.config;
  const double snr = c.pu_power * profile.pu_su_var / profile.sensing_noise;
  if (c.ideal_sensing) return sensing_from_detector(c.prior_idle, 0.0, 1.0, snr);
  const double p_fa = false_alarm_at_target_pd(snr, model.derived.sensing_samples, c.target_detection);
  return sensing_from_detector(c.prior_idle, p_fa, c.target_detection, snr);
}

} // namespace ehcr
