#include "ehcr/battery.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace ehcr {

namespace {

// Harvest-law lookups on {0..K} with the boundary conventions used by the chain.
class HarvestLaw {
 public:
  explicit HarvestLaw(std::span<const double> pmf) : pmf_(pmf.begin(), pmf.end()), cdf_(pmf.size()), tail_(pmf.size()) {
    double acc = 0.0;
    for (std::size_t r = 0; r < pmf_.size(); ++r) {
      acc += pmf_[r];
      cdf_[r] = acc;
    }
    acc = 0.0;
    for (std::size_t r = pmf_.size(); r-- > 0;) {
      acc += pmf_[r];
      tail_[r] = acc;
    }
  }

  double pmf(long x) const { return x < 0 || x >= size() ? 0.0 : pmf_[static_cast<std::size_t>(x)]; }
  // P(h <= x)
  double cdf(long x) const {
    if (x < 0) return 0.0;
    if (x >= size() - 1) return 1.0;
    return cdf_[static_cast<std::size_t>(x)];
  }
  // P(h >= x)
  double tail(long x) const {
    if (x <= 0) return 1.0;
    if (x >= size()) return 0.0;
    return tail_[static_cast<std::size_t>(x)];
  }

 private:
  long size() const { return static_cast<long>(pmf_.size()); }

  std::vector<double> pmf_, cdf_, tail_;
};

// Adds weight * P(next state | battery level `level` before harvesting) into column j.
void add_harvest_column(Eigen::MatrixXd& phi, int j, long level, double weight, const HarvestLaw& law) {
  const long cells = static_cast<long>(phi.rows()) - 1;
  phi(0, j) += weight * law.cdf(-level);
  for (long i = 1; i < cells; ++i) phi(i, j) += weight * law.pmf(i - level);
  phi(cells, j) += weight * law.tail(cells - level);
}

} // namespace

Eigen::MatrixXd build_transition_matrix(const PolicyPmf& pmf, const SensingStats& sensing,
                                        std::span<const double> harvest) {
  const int cells = pmf.cells();
  const auto needed = static_cast<std::size_t>(cells + pmf.probe_cells()) + 1;
  if (cells < 1 || harvest.size() < needed) {
    throw std::invalid_argument(fmt::format("build_transition_matrix: harvest pmf has {} entries, need at least {}",
                                            harvest.size(), needed));
  }
  const HarvestLaw law(harvest);
  const int probe = pmf.probe_cells();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(cells + 1, cells + 1);
  for (int j = 0; j <= cells; ++j) {
    if (sensing.pi_hat_idle > 0.0) {
      for (int l = 0; l <= cells; ++l) {
        const double p = pmf.psi(0, j, l);
        if (p == 0.0) continue;
        add_harvest_column(phi, j, static_cast<long>(j) - probe - l, p * sensing.pi_hat_idle, law);
      }
    }
    if (sensing.pi_hat_busy > 0.0) add_harvest_column(phi, j, j, sensing.pi_hat_busy, law);
  }
  return phi;
}

Eigen::VectorXd power_iteration(const Eigen::MatrixXd& transition, int max_squarings) {
  Eigen::MatrixXd p = transition;
  for (int s = 0; s < max_squarings; ++s) {
    Eigen::MatrixXd next = p * p;
    // Column sums drift by an ulp per product; left alone that compounds over 2^m steps.
    next.array().rowwise() /= next.colwise().sum().array();
    const double change = (next - p).cwiseAbs().maxCoeff();
    p.swap(next);
    if (change < 1e-14) break;
  }
  Eigen::VectorXd zeta = p.rowwise().mean();
  for (int it = 0; it < 4; ++it) {
    zeta = transition * zeta;
    zeta /= zeta.sum();
  }
  return zeta;
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition, const SteadyStateOptions& options) {
  const auto n = transition.rows();
  const std::string where = options.context.empty() ? std::string() : " (" + options.context + ")";
  Eigen::MatrixXd system = transition - Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  if (!(lu.rcond() > 1e-14)) {
    throw ChainError("chain not ergodic under these parameters: singular steady-state system" + where);
  }
  Eigen::VectorXd zeta = lu.solve(Eigen::VectorXd::Ones(n));
  if (!zeta.allFinite() || zeta.minCoeff() < -1e-9) {
    throw ChainError("chain not ergodic under these parameters: invalid steady-state vector" + where);
  }
  zeta = zeta.cwiseMax(0.0);
  zeta /= zeta.sum();

  if (options.verify) {
    const Eigen::VectorXd reference = power_iteration(transition);
    const double gap = (reference - zeta).cwiseAbs().maxCoeff();
    if (!(gap <= options.tolerance)) {
      throw ChainError(fmt::format("chain not ergodic under these parameters: power iteration disagrees by {:.3g}{}",
                                   gap, where));
    }
  }
  return zeta;
}

double battery_outage(const Eigen::VectorXd& zeta, int probe_cells) {
  const auto last = std::min<Eigen::Index>(probe_cells, zeta.size() - 1);
  return zeta.head(last + 1).sum();
}

double avg_energy(const Eigen::VectorXd& zeta) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < zeta.size(); ++k) acc += static_cast<double>(k) * zeta[k];
  return acc;
}

BatteryChain solve_chain(const PolicyPmf& pmf, const SensingStats& sensing, std::span<const double> harvest,
                         const SteadyStateOptions& options) {
  BatteryChain chain;
  chain.transition = build_transition_matrix(pmf, sensing, harvest);
  chain.steady_state = steady_state(chain.transition, options);
  chain.avg_energy = avg_energy(chain.steady_state);
  chain.battery_outage = battery_outage(chain.steady_state, pmf.probe_cells());
  return chain;
}

} // namespace ehcr
