#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "ehcr/model.hpp"
#include "ehcr/policy.hpp"
#include "ehcr/probing.hpp"
#include "ehcr/sensing.hpp"

namespace ehcr {

// e^z E1(z) for z > 0. Stays finite where E1 itself underflows.
double scaled_exp_integral_e1(double z);

// Exponential integral Ei(x) for x < 0 (Ei(x) = -E1(-x)). Throws std::domain_error for x >= 0.
double exp_integral_ei(double x);

// Antiderivative of log2(1 + S x) e^{-x/w} / w; M(+inf) = 0.
double antiderivative_m(double x, double snr_scale, double mean_gain);

// Integral of log2(1 + S x) e^{-x/w} / w over [lower, upper); zero for empty or S = 0 segments.
double segment_integral(double lower, double upper, double snr_scale, double mean_gain);

// Effective SNR per unit gain when spending `level` units under hypothesis e (S_i^e).
double effective_snr(int level, int hypothesis, double unit_power, const EstimationStats& est, double ap_noise);

struct RatePart {
  double total = 0.0;                  // bits/s
  std::array<double, 2> by_hypothesis{}; // bits/s contributed by H0 / H1 slots
};

// Closed-form rate lower bound for one SU.
RatePart rate_lower_bound(const Model& model, const SuProfile& profile, const Eigen::VectorXd& zeta,
                          const PolicyPmf& pmf, const EstimationStats& est, const SensingStats& sensing);

// Mean data energy units spent per sensed-idle, truly-busy slot: sum_k zeta_k sum_i psi^1_{i,k} i.
double busy_spend_units(const Eigen::VectorXd& zeta, const PolicyPmf& pmf);

// One SU's term of the average-interference left-hand side (watts).
double interference_contribution(const Model& model, const SuProfile& profile, const Eigen::VectorXd& zeta,
                                 const PolicyPmf& pmf, const SensingStats& sensing);

// P(no data power | sensed idle), mixing the hypotheses by omega0 / omega1.
double transmission_outage(const Eigen::VectorXd& zeta, const PolicyPmf& pmf, const SensingStats& sensing);

struct RateBreakdown {
  std::vector<double> su_rate;
  std::vector<std::array<double, 2>> su_rate_by_hypothesis;
  std::vector<double> su_interference;
  double sum_rate = 0.0;
  double aic_lhs = 0.0;
  bool aic_satisfied = true;
};

// Order-insensitive (Neumaier) sum.
double compensated_sum(const std::vector<double>& values);

} // namespace ehcr
