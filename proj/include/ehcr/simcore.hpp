#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehcr/analysis.hpp"
#include "ehcr/model.hpp"

namespace ehcr {

struct SimOptions {
  long slots = 100000;
  std::uint64_t seed = 1;
  long burn_in = 1000;        // slots discarded before statistics are collected
  bool record = false;        // keep per-slot records
  bool idle_gain_law = false; // draw g_hat from the H0 estimate law even in busy slots
  // Sensed idle with fewer than alpha_t cells: false = skip the slot, true = probe
  // anyway and clamp the battery at zero after harvesting.
  bool clamp_probe = false;
};

struct SlotRecord {
  long slot = 0;
  int su = 0;
  int busy = 0;        // true PU state
  int sensed_busy = 0;
  int before = 0;      // battery at slot start
  int after = 0;       // battery at the next slot start
  long harvested = 0;  // untruncated draw
  int probe = 0;       // cells used for the pilot
  int spent = 0;       // cells used for data
  double gain = 0.0;   // fed-back g_hat, 0 when no probe
  double rate = 0.0;   // bits/s sample
  double interference = 0.0; // watts sample
};

// Per-SU aggregates; everything is computed from post-burn-in slots.
struct SuAggregate {
  long slots = 0;
  std::vector<long> state_counts;   // visits to battery state k at slot start
  Eigen::MatrixXd transitions;      // (next, current) counts
  long sensed_idle = 0;
  long silent_idle = 0;             // sensed-idle slots with no data power
  long transmissions = 0;
  long skipped_probes = 0;          // sensed idle but battery < alpha_t
  long overflow_events = 0;         // harvest clipped at K
  long underflow_events = 0;        // battery clipped at 0 (clamp_probe only)
  double rate_sum = 0.0;
  double interference_sum = 0.0;

  Eigen::VectorXd zeta() const;
  double avg_energy() const;
  double battery_outage(int probe_cells) const;
  double transmission_outage() const;
  double mean_rate() const;
  double mean_interference() const;
  // Column-normalized empirical transition matrix; unvisited columns are zero.
  Eigen::MatrixXd empirical_transition() const;
};

struct SimTrace {
  long slots = 0;
  std::uint64_t seed = 0;
  int probe_cells = 0;
  std::vector<SuAggregate> users;
  std::vector<SlotRecord> records;

  double sum_rate() const;
  double aic_lhs() const;
};

// Seed for SU `su`'s private stream.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t su);

SimTrace simulate(const Model& model, const std::vector<PolicyParams>& params, const SimOptions& options);

struct AnalyticSummary {
  Eigen::VectorXd zeta;
  double rate = 0.0;
  double aic = 0.0;
  double avg_energy = 0.0;
  double battery_outage = 0.0;
  double transmission_outage = 0.0;

  static AnalyticSummary from(const SuAnalysis& a);
};

struct Tolerances {
  double zeta_tv = 0.01;
  double relative = 0.01;
  double outage = 0.005;
};

struct CompareItem {
  int su = 0;
  std::string quantity;
  double analytic = 0.0;
  double empirical = 0.0;
  double deviation = 0.0; // TV distance, relative or absolute error as named by `kind`
  double tolerance = 0.0;
  std::string kind;
  bool pass = false;
};

struct CompareReport {
  bool sufficient_samples = false;
  bool pass = false;
  std::vector<CompareItem> items;
  std::string note;
};

CompareReport compare(const SimTrace& trace, const std::vector<AnalyticSummary>& analytic, const Tolerances& tol = {});

} // namespace ehcr
