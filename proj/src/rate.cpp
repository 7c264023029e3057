#include "ehcr/rate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ehcr {

namespace {

constexpr double kEulerGamma = std::numbers::egamma;

// E1(z) = -gamma - ln z - sum_{n>=1} (-z)^n / (n n!), used for 0 < z <= 1.
double e1_series(double z) {
  double sum = 0.0;
  double term = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= -z / n;
    const double contrib = term / n;
    sum += contrib;
    if (std::abs(contrib) < 1e-17 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(z) - sum;
}

// e^z E1(z) by the modified Lentz continued fraction, for z > 1.
double scaled_e1_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

} // namespace

double scaled_exp_integral_e1(double z) {
  if (!(z > 0.0)) throw std::domain_error("scaled_exp_integral_e1: z must be > 0");
  if (std::isinf(z)) return 0.0;
  if (z <= 1.0) return std::exp(z) * e1_series(z);
  return scaled_e1_continued_fraction(z);
}

double exp_integral_ei(double x) {
  if (!(x < 0.0)) throw std::domain_error("exp_integral_ei: argument must be negative");
  const double z = -x;
  if (z <= 1.0) return -e1_series(z);
  return -scaled_e1_continued_fraction(z) * std::exp(x);
}

double antiderivative_m(double x, double snr_scale, double mean_gain) {
  if (std::isinf(x) || snr_scale == 0.0) return 0.0;
  const double u = 1.0 / (snr_scale * mean_gain);
  const double z = x / mean_gain + u;
  return -std::exp(-x / mean_gain) *
         (scaled_exp_integral_e1(z) / std::numbers::ln2 + std::log1p(snr_scale * x) / std::numbers::ln2);
}

double segment_integral(double lower, double upper, double snr_scale, double mean_gain) {
  if (!(lower < upper) || snr_scale == 0.0 || !(mean_gain > 0.0)) return 0.0;
  return antiderivative_m(upper, snr_scale, mean_gain) - antiderivative_m(lower, snr_scale, mean_gain);
}

double effective_snr(int level, int hypothesis, double unit_power, const EstimationStats& est, double ap_noise) {
  const double power = level * unit_power;
  const double noise = ap_noise + (hypothesis == 1 ? est.pu_interference_var : 0.0);
  return power / (est.var_err[hypothesis] * power + noise);
}

RatePart rate_lower_bound(const Model& model, const SuProfile& profile, const Eigen::VectorXd& zeta,
                          const PolicyPmf& pmf, const EstimationStats& est, const SensingStats& sensing) {
  const double pu = model.derived.unit_power;
  const std::array<double, 2> beta{sensing.beta0, sensing.beta1};
  RatePart out;
  for (int e = 0; e < 2; ++e) {
    if (beta[e] == 0.0 || !(est.var_hat[e] > 0.0)) continue;
    // S_i^e depends only on the level; cache it across battery states.
    std::vector<double> snr(static_cast<std::size_t>(pmf.cells()) + 1, 0.0);
    for (int i = 1; i <= pmf.cells(); ++i) snr[i] = effective_snr(i, e, pu, est, profile.ap_noise);
    double acc = 0.0;
    for (int k = pmf.probe_cells() + 1; k <= pmf.cells(); ++k) {
      const double weight = zeta[k];
      if (weight == 0.0) continue;
      double inner = 0.0;
      for (const auto& bp : pmf.levels(k)) {
        inner += segment_integral(bp.lower, bp.upper, snr[bp.level], est.var_hat[e]);
      }
      acc += weight * inner;
    }
    out.by_hypothesis[e] = model.derived.data_fraction * beta[e] * acc;
  }
  const double bandwidth = model.config.bandwidth;
  out.by_hypothesis[0] *= bandwidth;
  out.by_hypothesis[1] *= bandwidth;
  out.total = out.by_hypothesis[0] + out.by_hypothesis[1];
  return out;
}

double busy_spend_units(const Eigen::VectorXd& zeta, const PolicyPmf& pmf) {
  double acc = 0.0;
  for (int k = pmf.probe_cells() + 1; k <= pmf.cells(); ++k) {
    double inner = 0.0;
    for (const auto& bp : pmf.levels(k)) inner += pmf.psi(1, k, bp.level) * bp.level;
    acc += zeta[k] * inner;
  }
  return acc;
}

double interference_contribution(const Model& model, const SuProfile& profile, const Eigen::VectorXd& zeta,
                                 const PolicyPmf& pmf, const SensingStats& sensing) {
  if (sensing.beta1 == 0.0) return 0.0;
  const auto& d = model.derived;
  const double data = busy_spend_units(zeta, pmf) * d.unit_power;
  return sensing.beta1 * profile.su_pu_var * (data + d.training_fraction * d.training_power);
}

double transmission_outage(const Eigen::VectorXd& zeta, const PolicyPmf& pmf, const SensingStats& sensing) {
  double out = 0.0;
  for (int k = 0; k <= pmf.cells(); ++k) {
    if (k <= pmf.probe_cells()) {
      out += zeta[k];
    } else {
      out += zeta[k] * (sensing.omega0 * pmf.idle_probability(0, k) + sensing.omega1 * pmf.idle_probability(1, k));
    }
  }
  return out;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

} // namespace ehcr
