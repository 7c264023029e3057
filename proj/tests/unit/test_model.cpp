#include <doctest.h>

#include <boost/math/distributions/poisson.hpp>

#include "ehcr/model.hpp"
#include "fixtures.hpp"

using namespace ehcr;

TEST_CASE("derived constants for the table 2 system") {
  const auto m = fixtures::table2();
  const auto& d = m.derived;
  CHECK(d.data_duration == doctest::Approx(8.9e-3).epsilon(1e-12));
  CHECK(d.sensing_samples == 100);
  CHECK(d.training_symbols == 10);
  CHECK(d.data_symbols == 890);
  CHECK(d.unit_power == doctest::Approx(0.01 / 8.9e-3).epsilon(1e-12));
  CHECK(d.training_power == doctest::Approx(100.0).epsilon(1e-12));
  // P_t N_t = (alpha_t e_u / tau_t) (tau_t f_s)
  CHECK(d.training_energy == doctest::Approx(d.training_power * d.training_symbols).epsilon(1e-12));
  CHECK(d.data_fraction + d.training_fraction == doctest::Approx(1.0 - 1e-3 / 10e-3));
  CHECK(d.prior_busy == doctest::Approx(0.3));
  CHECK(m.warnings.empty());
}

TEST_CASE("sensing that fills the slot is rejected with a tau_d message") {
  SystemConfig c;
  c.sensing_duration = c.slot_duration;
  const auto issues = check(c, {SuProfile{}});
  REQUIRE_FALSE(issues.empty());
  CHECK(issues.front().find("τd ≤ 0") != std::string::npos);
  CHECK_THROWS_AS(validate(c, {SuProfile{}}), ValidationError);
}

TEST_CASE("every violation is reported, not just the first") {
  SystemConfig c;
  c.prior_idle = 1.0;
  c.probe_cells = c.battery_cells;
  SuProfile p;
  p.harvest_rate = -1.0;
  try {
    validate(c, {p});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 3);
  }
  CHECK_FALSE(check(c, {}).empty());
}

TEST_CASE("fractional sample counts warn instead of failing") {
  SystemConfig c;
  c.sampling_frequency = 12345.0;
  const auto m = validate(c, {SuProfile{}});
  CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("harvest pmf matches the Poisson law with the tail in the last cell") {
  for (double rho : {0.3, 5.0, 15.0, 60.0}) {
    const int cells = 40;
    const auto pmf = harvest_pmf(rho, cells);
    REQUIRE(pmf.size() == 41);
    boost::math::poisson_distribution<double> law(rho);
    double sum = 0.0;
    for (int r = 0; r < cells; ++r) {
      CHECK(pmf[r] == doctest::Approx(boost::math::pdf(law, r)).epsilon(1e-12));
      sum += pmf[r];
    }
    CHECK(pmf[cells] == doctest::Approx(boost::math::cdf(boost::math::complement(law, cells - 1))).epsilon(1e-9));
    CHECK(sum + pmf[cells] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("harvest pmf edge cases") {
  const auto zero = harvest_pmf(0.0, 5);
  CHECK(zero[0] == 1.0);
  CHECK(zero[5] == 0.0);
  const auto huge = harvest_pmf(1e4, 10);
  CHECK(huge[10] == doctest::Approx(1.0));
  CHECK_THROWS(harvest_pmf(-1.0, 5));
  CHECK_THROWS(harvest_pmf(1.0, 0));
}
