#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/poisson.hpp>

#include "ehcr/analysis.hpp"
#include "ehcr/battery.hpp"
#include "fixtures.hpp"

using namespace ehcr;

namespace {

// Transition matrix by direct enumeration of (sensing outcome, spend, harvest) with an
// untruncated Poisson harvest and the clamp B' = min(max(B - a_t - alpha + h, 0), K).
Eigen::MatrixXd enumerated_chain(const PolicyPmf& pmf, const SensingStats& s, double rho) {
  const int K = pmf.cells();
  const int at = pmf.probe_cells();
  boost::math::poisson_distribution<double> law(rho);
  const int hmax = static_cast<int>(rho + 40 * std::sqrt(rho + 1) + 2 * K);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(K + 1, K + 1);
  for (int j = 0; j <= K; ++j) {
    for (int h = 0; h <= hmax; ++h) {
      const double ph = boost::math::pdf(law, h);
      phi(std::min(j + h, K), j) += s.pi_hat_busy * ph;
      for (int l = 0; l <= K; ++l) {
        const double w = pmf.psi(0, j, l);
        if (w == 0.0) continue;
        const int next = std::clamp(j - at - l + h, 0, K);
        phi(next, j) += s.pi_hat_idle * w * ph;
      }
    }
  }
  return phi;
}

SuAnalysis table2_point(double omega, double theta, int K = 80, int at = 1) {
  SystemConfig c;
  c.battery_cells = K;
  c.probe_cells = at;
  const auto m = validate(c, {SuProfile{}});
  return analyze_su(m, 0, {omega, theta});
}

} // namespace

TEST_CASE("transition matrix matches direct enumeration") {
  for (auto [K, at, omega, theta, rho] : {std::tuple{7, 1, 0.75, 0.02, 3.0}, std::tuple{7, 1, 0.95, 0.05, 2.0},
                                          std::tuple{25, 3, 0.6, 0.4, 4.0}, std::tuple{40, 0, 1.0, 0.0, 1.5}}) {
    SystemConfig c;
    c.battery_cells = K;
    c.probe_cells = at;
    SuProfile p;
    p.harvest_rate = rho;
    const auto m = validate(c, {p});
    const auto a = analyze_su(m, 0, {omega, theta});
    const auto oracle = enumerated_chain(a.pmf, a.sensing, rho);
    CHECK((a.chain.transition - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("columns are distributions") {
  const auto a = table2_point(0.35, 0.2);
  const auto& T = a.chain.transition;
  CHECK(T.minCoeff() >= 0.0);
  for (Eigen::Index j = 0; j < T.cols(); ++j) CHECK(std::abs(T.col(j).sum() - 1.0) < 1e-12);
}

TEST_CASE("steady state is the fixed point and agrees with power iteration") {
  const auto a = table2_point(0.45, 0.2);
  const auto& z = a.chain.steady_state;
  CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z.minCoeff() >= 0.0);
  CHECK((a.chain.transition * z - z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((power_iteration(a.chain.transition) - z).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("average energy and battery outage") {
  Eigen::VectorXd z(4);
  z << 0.1, 0.2, 0.3, 0.4;
  CHECK(avg_energy(z) == doctest::Approx(2.0));
  CHECK(battery_outage(z, 1) == doctest::Approx(0.3));
  CHECK(battery_outage(z, 0) == doctest::Approx(0.1));
  CHECK(battery_outage(z, 10) == doctest::Approx(1.0));
}

TEST_CASE("a larger omega drains the battery") {
  const auto low = table2_point(0.30, 0.2);
  const auto high = table2_point(0.45, 0.2);
  CHECK(high.chain.avg_energy < low.chain.avg_energy);
  CHECK(high.chain.battery_outage >= low.chain.battery_outage - 1e-15);
  CHECK(low.chain.avg_energy <= 80.0);
}

TEST_CASE("a chain with no way out of every state is rejected") {
  PolicyPmf pmf(5, 1);
  for (int k = 0; k <= 5; ++k) pmf.psi(0, k, 0) = pmf.psi(1, k, 0) = 1.0;
  const auto always_busy = sensing_from_detector(0.5, 1.0, 1.0);
  const auto no_harvest = harvest_pmf(0.0, 6);
  const auto T = build_transition_matrix(pmf, always_busy, no_harvest);
  CHECK(T.isIdentity());
  CHECK_THROWS_AS(steady_state(T), ChainError);
  try {
    SteadyStateOptions o;
    o.context = "su.1: K=5";
    steady_state(T, o);
  } catch (const ChainError& e) {
    CHECK(std::string(e.what()).find("su.1: K=5") != std::string::npos);
    CHECK(std::string(e.what()).find("not ergodic") != std::string::npos);
  }
}

TEST_CASE("harvest length must match the state space") {
  PolicyPmf pmf(5, 1);
  const auto s = sensing_from_detector(0.5, 0.1, 0.9);
  const auto h = harvest_pmf(1.0, 4);
  CHECK_THROWS_AS(build_transition_matrix(pmf, s, h), std::invalid_argument);
}

TEST_CASE("harvesting far below consumption empties the battery") {
  SystemConfig c;
  c.battery_cells = 30;
  SuProfile p;
  p.harvest_rate = 0.05;
  const auto m = validate(c, {p});
  const auto a = analyze_su(m, 0, {0.9, 0.01});
  CHECK(a.chain.avg_energy < 1.0);
  CHECK(a.chain.battery_outage > 0.9);
}
