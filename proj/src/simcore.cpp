#include "ehcr/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "ehcr/policy.hpp"
#include "ehcr/probing.hpp"
#include "ehcr/rate.hpp"
#include "ehcr/sensing.hpp"

namespace ehcr {

std::uint64_t stream_seed(std::uint64_t seed, std::size_t su) {
  // splitmix64 finalizer over (seed, su)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(su) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double uniform01(RngStream& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct SuSetup {
  SensingStats sensing;
  EstimationStats est;
  GainDistribution gain;
  std::array<std::vector<double>, 2> snr; // S_i^e by level
};

SuSetup setup_su(const Model& model, std::size_t su) {
  const auto& profile = model.profiles[su];
  SuSetup s;
  s.sensing = sensing_stats(model, profile);
  s.est = estimator_variances(model, profile, s.sensing);
  s.gain = GainDistribution::from(s.sensing, s.est);
  const int cells = model.config.battery_cells;
  for (int e = 0; e < 2; ++e) {
    s.snr[e].assign(static_cast<std::size_t>(cells) + 1, 0.0);
    for (int i = 1; i <= cells; ++i) s.snr[e][i] = effective_snr(i, e, model.derived.unit_power, s.est, profile.ap_noise);
  }
  return s;
}

} // namespace

Eigen::VectorXd SuAggregate::zeta() const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_counts.size()));
  if (slots == 0) return z;
  for (std::size_t k = 0; k < state_counts.size(); ++k) z[k] = static_cast<double>(state_counts[k]) / slots;
  return z;
}

double SuAggregate::avg_energy() const { return ehcr::avg_energy(zeta()); }

double SuAggregate::battery_outage(int probe_cells) const { return ehcr::battery_outage(zeta(), probe_cells); }

double SuAggregate::transmission_outage() const {
  return sensed_idle == 0 ? 0.0 : static_cast<double>(silent_idle) / sensed_idle;
}

double SuAggregate::mean_rate() const { return slots == 0 ? 0.0 : rate_sum / slots; }

double SuAggregate::mean_interference() const { return slots == 0 ? 0.0 : interference_sum / slots; }

Eigen::MatrixXd SuAggregate::empirical_transition() const {
  Eigen::MatrixXd p = transitions;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double total = p.col(j).sum();
    if (total > 0.0) p.col(j) /= total;
  }
  return p;
}

double SimTrace::sum_rate() const {
  std::vector<double> r;
  for (const auto& u : users) r.push_back(u.mean_rate());
  return compensated_sum(r);
}

double SimTrace::aic_lhs() const {
  std::vector<double> r;
  for (const auto& u : users) r.push_back(u.mean_interference());
  return compensated_sum(r);
}

SimTrace simulate(const Model& model, const std::vector<PolicyParams>& params, const SimOptions& options) {
  if (options.slots < 1) throw std::invalid_argument("simulate: slots must be >= 1");
  if (options.burn_in < 0) throw std::invalid_argument("simulate: burn-in must be >= 0");
  if (params.size() != model.profiles.size()) {
    throw std::invalid_argument(fmt::format("simulate: {} policy points for {} SUs", params.size(), model.profiles.size()));
  }
  const auto& cfg = model.config;
  const auto& d = model.derived;
  const int cells = cfg.battery_cells;
  const int probe = cfg.probe_cells;

  SimTrace trace;
  trace.slots = options.slots;
  trace.seed = options.seed;
  trace.probe_cells = probe;

  for (std::size_t n = 0; n < params.size(); ++n) {
    const auto& profile = model.profiles[n];
    const auto s = setup_su(model, n);
    const double p_busy_sensed[2] = {s.sensing.p_fa, s.sensing.p_d};
    RngStream rng(stream_seed(options.seed, n));
    std::poisson_distribution<long> harvest(profile.harvest_rate > 0.0 ? profile.harvest_rate : 1.0);
    const bool harvests = profile.harvest_rate > 0.0;

    SuAggregate agg;
    agg.state_counts.assign(static_cast<std::size_t>(cells) + 1, 0);
    agg.transitions = Eigen::MatrixXd::Zero(cells + 1, cells + 1);

    int battery = cells / 2;
    const long total = options.burn_in + options.slots;
    for (long t = 0; t < total; ++t) {
      const bool counted = t >= options.burn_in;
      SlotRecord rec;
      rec.slot = t - options.burn_in;
      rec.su = static_cast<int>(n);
      rec.before = battery;
      rec.busy = uniform01(rng) < d.prior_busy ? 1 : 0;
      rec.sensed_busy = uniform01(rng) < p_busy_sensed[rec.busy] ? 1 : 0;

      long level = battery; // may go negative in clamp mode before harvesting
      bool silent = true;
      if (!rec.sensed_busy) {
        if (battery >= probe || options.clamp_probe) {
          rec.probe = probe;
          const auto law = options.idle_gain_law ? Hypothesis::Idle : static_cast<Hypothesis>(rec.busy);
          rec.gain = sample_gain(s.gain, law, rng);
          rec.spent = battery >= probe ? alpha(battery, rec.gain, params[n], probe) : 0;
          level = static_cast<long>(battery) - probe - rec.spent;
          if (rec.spent > 0) {
            silent = false;
            rec.rate = d.data_fraction * cfg.bandwidth * std::log2(1.0 + rec.gain * s.snr[rec.busy][rec.spent]);
          }
          if (rec.busy) {
            rec.interference = profile.su_pu_var * (rec.spent * d.unit_power + d.training_fraction * d.training_power);
          }
        } else if (counted) {
          ++agg.skipped_probes;
        }
      }
      rec.harvested = harvests ? harvest(rng) : 0;
      long next = level + rec.harvested;
      if (next > cells) {
        next = cells;
        if (counted) ++agg.overflow_events;
      }
      if (next < 0) {
        next = 0;
        if (counted) ++agg.underflow_events;
      }
      rec.after = static_cast<int>(next);

      if (counted) {
        ++agg.slots;
        ++agg.state_counts[static_cast<std::size_t>(battery)];
        agg.transitions(rec.after, battery) += 1.0;
        if (!rec.sensed_busy) {
          ++agg.sensed_idle;
          if (silent) ++agg.silent_idle;
        }
        if (rec.spent > 0) ++agg.transmissions;
        agg.rate_sum += rec.rate;
        agg.interference_sum += rec.interference;
        if (options.record) trace.records.push_back(rec);
      }
      battery = rec.after;
    }
    trace.users.push_back(std::move(agg));
  }
  return trace;
}

AnalyticSummary AnalyticSummary::from(const SuAnalysis& a) {
  AnalyticSummary s;
  s.zeta = a.chain.steady_state;
  s.rate = a.rate.total;
  s.aic = a.interference;
  s.avg_energy = a.chain.avg_energy;
  s.battery_outage = a.chain.battery_outage;
  s.transmission_outage = a.transmission_outage;
  return s;
}

namespace {

double relative_error(double analytic, double empirical) {
  if (analytic == 0.0) return empirical == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(empirical - analytic) / std::abs(analytic);
}

} // namespace

CompareReport compare(const SimTrace& trace, const std::vector<AnalyticSummary>& analytic, const Tolerances& tol) {
  CompareReport report;
  if (trace.slots < 1 || trace.users.empty() || trace.users.front().slots < 1) {
    report.note = "insufficient samples: the trace holds no slots";
    return report;
  }
  if (analytic.size() != trace.users.size()) {
    throw std::invalid_argument("compare: analytic summary count differs from the trace's SU count");
  }
  report.sufficient_samples = true;
  report.pass = true;
  auto add = [&](int su, const char* name, double a, double e, double dev, double t, const char* kind) {
    CompareItem item{su, name, a, e, dev, t, kind, dev <= t};
    report.pass = report.pass && item.pass;
    report.items.push_back(std::move(item));
  };
  for (std::size_t n = 0; n < analytic.size(); ++n) {
    const auto& u = trace.users[n];
    const auto& a = analytic[n];
    const int su = static_cast<int>(n);
    const Eigen::VectorXd z = u.zeta();
    if (z.size() != a.zeta.size()) throw std::invalid_argument("compare: state spaces differ");
    add(su, "zeta", 0.0, 0.0, 0.5 * (z - a.zeta).cwiseAbs().sum(), tol.zeta_tv, "tv");
    add(su, "avg_energy", a.avg_energy, u.avg_energy(), relative_error(a.avg_energy, u.avg_energy()), tol.relative, "relative");
    add(su, "rate", a.rate, u.mean_rate(), relative_error(a.rate, u.mean_rate()), tol.relative, "relative");
    add(su, "aic", a.aic, u.mean_interference(), relative_error(a.aic, u.mean_interference()), tol.relative, "relative");
    const double pb = u.battery_outage(trace.probe_cells);
    add(su, "battery_outage", a.battery_outage, pb, std::abs(pb - a.battery_outage), tol.outage, "absolute");
    const double pa = u.transmission_outage();
    add(su, "transmission_outage", a.transmission_outage, pa, std::abs(pa - a.transmission_outage), tol.outage,
        "absolute");
  }
  return report;
}

} // namespace ehcr
