#pragma once

#include "ehcr/model.hpp"

namespace ehcr {

// Gaussian tail Q(x) = P(N(0,1) > x).
double q_function(double x);

// Inverse of q_function on (0,1).
double q_inverse(double p);

struct DetectorProbabilities {
  double p_fa = 0.0;
  double p_d = 0.0;
};

// Energy detector with threshold xi under the CLT approximation.
DetectorProbabilities detector_probabilities(double threshold, double snr, long samples, double noise_power);

// False-alarm probability when the threshold is set to hit the target detection probability.
double false_alarm_at_target_pd(double snr, long samples, double target_pd);

// Joint sensing-outcome probabilities for one SU.
//   beta0 = P(idle, sensed idle), beta1 = P(busy, sensed idle)
//   omega_e = P(H_e | sensed idle)
struct SensingStats {
  double p_fa = 0.0;
  double p_d = 0.0;
  double pi_hat_idle = 0.0;
  double pi_hat_busy = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double omega0 = 1.0;
  double omega1 = 0.0;
  double snr = 0.0;
};

// Builds SensingStats from explicit detector probabilities.
SensingStats sensing_from_detector(double prior_idle, double p_fa, double p_d, double snr = 0.0);

SensingStats sensing_stats(const Model& model, const SuProfile& profile);

} // namespace ehcr
