#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "ehcr/analysis.hpp"
#include "ehcr/rate.hpp"
#include "fixtures.hpp"

using namespace ehcr;

namespace {

double integrand_integral(double a, double c, double S, double w) {
  auto f = [&](double x) { return std::log2(1 + S * x) * std::exp(-x / w) / w; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, c, 15, 1e-13);
}

} // namespace

TEST_CASE("Ei at reference points") {
  // mpmath, 30 digits
  const std::pair<double, double> ref[] = {{-1e-8, -17.843465089050832566}, {-0.5, -0.55977359477616081175},
                                           {-1.0, -0.21938393439552027368}, {-5.0, -0.0011482955912753257973},
                                           {-30.0, -3.0215520106888125448e-15}, {-100.0, -3.6835977616820321802e-46},
                                           {-700.0, -1.4065187662340329228e-307}};
  for (auto [x, v] : ref) CHECK(exp_integral_ei(x) == doctest::Approx(v).epsilon(1e-13));
  CHECK(exp_integral_ei(-800.0) == 0.0);
  CHECK_THROWS_AS(exp_integral_ei(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_ei(1.0), std::domain_error);
}

TEST_CASE("scaled E1 is continuous across the series / fraction switch") {
  const double below = scaled_exp_integral_e1(1.0);
  const double above = scaled_exp_integral_e1(std::nextafter(1.0, 2.0));
  CHECK(below == doctest::Approx(above).epsilon(1e-14));
  CHECK(scaled_exp_integral_e1(1e6) == doctest::Approx(1.0 / (1e6 + 1)).epsilon(1e-10));
  CHECK(scaled_exp_integral_e1(2.5) == doctest::Approx(std::exp(2.5) * boost::math::expint(1, 2.5)).epsilon(1e-14));
  CHECK_THROWS(scaled_exp_integral_e1(0.0));
}

TEST_CASE("segment integrals against quadrature and frozen values") {
  CHECK(segment_integral(0.5, 1.7, 0.3, 2.0) == doctest::Approx(0.13614936995850138345).epsilon(1e-13));
  CHECK(segment_integral(0.5, INFINITY, 0.3, 2.0) == doctest::Approx(0.57644518301212857587).epsilon(1e-13));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = 3 * u(rng), c = a + 3 * u(rng), S = 0.01 + 5 * u(rng), w = 0.1 + 3 * u(rng);
    CHECK(std::abs(segment_integral(a, c, S, w) - integrand_integral(a, c, S, w)) < 1e-10);
  }
  CHECK(segment_integral(1.0, 1.0, 0.3, 2.0) == 0.0);
  CHECK(segment_integral(2.0, 1.0, 0.3, 2.0) == 0.0);
  CHECK(segment_integral(0.0, 5.0, 0.0, 2.0) == 0.0);
  CHECK(antiderivative_m(INFINITY, 0.3, 2.0) == 0.0);
}

TEST_CASE("effective SNR") {
  EstimationStats e;
  e.var_err = {0.1, 0.2};
  e.pu_interference_var = 3.0;
  CHECK(effective_snr(2, 0, 1.5, e, 1.0) == doctest::Approx(3.0 / (0.1 * 3.0 + 1.0)));
  CHECK(effective_snr(2, 1, 1.5, e, 1.0) == doctest::Approx(3.0 / (0.2 * 3.0 + 1.0 + 3.0)));
}

TEST_CASE("rate lower bound against per-segment quadrature") {
  const auto m = fixtures::table2(100e3, 40);
  const auto a = analyze_su(m, 0, {0.4, 0.3});
  const auto& d = m.derived;
  const double beta[2] = {a.sensing.beta0, a.sensing.beta1};
  double expected = 0.0;
  for (int e = 0; e < 2; ++e) {
    for (int k = m.config.probe_cells + 1; k <= 40; ++k) {
      for (const auto& bp : a.pmf.levels(k)) {
        if (std::isinf(bp.lower)) continue;
        const double S = bp.level * d.unit_power / (a.estimation.var_err[e] * bp.level * d.unit_power + 1.0 + e * 1.0);
        const double upper = std::isinf(bp.upper) ? bp.lower + 80 * a.estimation.var_hat[e] : bp.upper;
        expected += beta[e] * a.chain.steady_state[k] * integrand_integral(bp.lower, upper, S, a.estimation.var_hat[e]);
      }
    }
  }
  expected *= d.data_fraction * m.config.bandwidth;
  CHECK(a.rate.total == doctest::Approx(expected).epsilon(1e-9));
  CHECK(a.rate.by_hypothesis[0] + a.rate.by_hypothesis[1] == doctest::Approx(a.rate.total));
}

TEST_CASE("interference term") {
  const auto m = fixtures::table2(100e3, 30);
  const auto a = analyze_su(m, 0, {0.5, 0.1});
  const auto& d = m.derived;
  double spend = 0.0;
  for (int k = 0; k <= 30; ++k) {
    for (int i = 0; i <= 30; ++i) spend += a.chain.steady_state[k] * a.pmf.psi(1, k, i) * i;
  }
  const double expected = a.sensing.beta1 * 1.0 * (spend * d.unit_power + d.training_fraction * d.training_power);
  CHECK(a.interference == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("omega = 0 transmits nothing") {
  const auto m = fixtures::table2();
  const auto a = analyze_su(m, 0, {0.0, 0.2});
  CHECK(a.rate.total == 0.0);
  CHECK(a.transmission_outage == doctest::Approx(1.0));
  // only the pilot reaches the PU
  CHECK(a.interference == doctest::Approx(a.sensing.beta1 * m.derived.training_fraction * m.derived.training_power));
}

TEST_CASE("ideal sensing removes all interference") {
  SystemConfig c;
  c.ideal_sensing = true;
  const auto m = validate(c, {SuProfile{}});
  const auto a = analyze_su(m, 0, {0.35, 0.2});
  CHECK(a.interference == 0.0);
  CHECK(a.rate.by_hypothesis[1] == 0.0);
  CHECK(a.rate.total > 0.0);
}

TEST_CASE("table 2 reference point") {
  // Regression pin, cross-checked by the 1e6-slot simulation in the acceptance suite.
  const auto m = fixtures::table2();
  const auto a = analyze_su(m, 0, {0.35, 0.2});
  CHECK(a.rate.total == doctest::Approx(28946.9963773859).epsilon(1e-10));
  CHECK(a.interference == doctest::Approx(0.8566730412748798).epsilon(1e-10));
  CHECK(a.chain.avg_energy == doctest::Approx(68.82741799304515).epsilon(1e-10));
  CHECK(a.transmission_outage == doctest::Approx(0.10358230270801574).epsilon(1e-10));
}

TEST_CASE("compensated sum") {
  CHECK(compensated_sum({1e16, 1.0, -1e16}) == 1.0);
  CHECK(compensated_sum({}) == 0.0);
}
