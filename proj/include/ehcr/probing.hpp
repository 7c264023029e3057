#pragma once

#include <array>
#include <random>

#include "ehcr/model.hpp"
#include "ehcr/sensing.hpp"

namespace ehcr {

// True PU state during a slot that was sensed idle.
enum class Hypothesis { Idle = 0, Busy = 1, Mixed = 2 };

// LMMSE channel-estimate statistics conditioned on a sensed-idle slot.
// Index 0/1 of the per-hypothesis arrays refers to the true PU state.
struct EstimationStats {
  std::array<double, 2> var_hat{};  // variance of the estimate h_hat under H0 / H1
  std::array<double, 2> var_err{};  // variance of the error h - h_hat under H0 / H1
  double var_hat_mixed = 0.0;
  double var_err_mixed = 0.0;
  double pu_interference_var = 0.0; // sigma_p^2
};

// Inputs to the estimator variances, split out so they can be evaluated directly.
//   training_energy: P_t N_t
EstimationStats estimator_variances(double channel_var, double training_energy, double ap_noise,
                                    double pu_interference_var, double omega0, double omega1);

EstimationStats estimator_variances(const Model& model, const SuProfile& profile, const SensingStats& sensing);

// Law of the fed-back gain g_hat = |h_hat|^2: exponential under each hypothesis,
// a two-component mixture when the true state is unknown.
struct GainDistribution {
  std::array<double, 2> weight{1.0, 0.0}; // omega0, omega1
  std::array<double, 2> mean{1.0, 1.0};   // var_hat under H0 / H1

  static GainDistribution from(const SensingStats& sensing, const EstimationStats& est);
};

// Exponential CDF with the given mean; a non-positive mean is a point mass at zero.
double exponential_cdf(double x, double mean);

// Survival function 1 - F, evaluated without cancellation.
double exponential_sf(double x, double mean);

double gain_cdf(const GainDistribution& dist, double x, Hypothesis hypothesis);

using RngStream = std::mt19937_64;

// Inverse-CDF draw from the hypothesis component (or the mixture).
double sample_gain(const GainDistribution& dist, Hypothesis hypothesis, RngStream& rng);

} // namespace ehcr
