#include <doctest.h>

#include <algorithm>

#include "ehcr/simcore.hpp"
#include "fixtures.hpp"

using namespace ehcr;

namespace {

Model model(int K = 80, double rho = 15.0, int at = 1) {
  SystemConfig c;
  c.battery_cells = K;
  c.probe_cells = at;
  SuProfile p;
  p.harvest_rate = rho;
  return validate(c, {p});
}

SimOptions opts(long slots, std::uint64_t seed = 1, bool record = false) {
  SimOptions o;
  o.slots = slots;
  o.seed = seed;
  o.record = record;
  return o;
}

} // namespace

TEST_CASE("fixed seed reproduces the trace") {
  const auto m = model();
  const auto a = simulate(m, {{0.35, 0.2}}, opts(20000, 9, true));
  const auto b = simulate(m, {{0.35, 0.2}}, opts(20000, 9, true));
  CHECK(a.users[0].state_counts == b.users[0].state_counts);
  CHECK(a.users[0].rate_sum == b.users[0].rate_sum);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(std::equal(a.records.begin(), a.records.end(), b.records.begin(),
                   [](const SlotRecord& x, const SlotRecord& y) { return x.after == y.after && x.gain == y.gain; }));
  const auto c = simulate(m, {{0.35, 0.2}}, opts(20000, 10));
  CHECK(c.users[0].rate_sum != a.users[0].rate_sum);
}

TEST_CASE("adding an SU does not perturb the others") {
  SystemConfig c;
  const auto one = validate(c, {SuProfile{}});
  const auto two = validate(c, {SuProfile{}, SuProfile{}});
  const auto a = simulate(one, {{0.35, 0.2}}, opts(10000, 3));
  const auto b = simulate(two, {{0.35, 0.2}, {0.5, 0.1}}, opts(10000, 3));
  CHECK(a.users[0].state_counts == b.users[0].state_counts);
  CHECK(stream_seed(3, 0) != stream_seed(3, 1));
}

TEST_CASE("records obey the battery dynamics and the aggregates follow from them") {
  const auto m = model(20, 2.0, 2);
  const auto t = simulate(m, {{0.8, 0.05}}, opts(50000, 4, true));
  const auto& u = t.users[0];
  REQUIRE(t.records.size() == 50000);
  long counts[21] = {};
  double rate = 0.0, interference = 0.0;
  long idle = 0, silent = 0;
  for (const auto& r : t.records) {
    CHECK(r.after >= 0);
    CHECK(r.after <= 20);
    if (r.spent > 0) CHECK(r.spent + r.probe <= r.before);
    const long raw = static_cast<long>(r.before) - r.probe - r.spent + r.harvested;
    CHECK(r.after == std::clamp<long>(raw, 0, 20));
    if (r.sensed_busy) CHECK(r.spent == 0);
    if (!r.busy) CHECK(r.interference == 0.0);
    ++counts[r.before];
    rate += r.rate;
    interference += r.interference;
    if (!r.sensed_busy) {
      ++idle;
      if (r.spent == 0) ++silent;
    }
  }
  for (int k = 0; k <= 20; ++k) CHECK(u.state_counts[k] == counts[k]);
  CHECK(u.rate_sum == doctest::Approx(rate));
  CHECK(u.interference_sum == doctest::Approx(interference));
  CHECK(u.sensed_idle == idle);
  CHECK(u.silent_idle == silent);
  CHECK(u.skipped_probes > 0); // rho = 2 with alpha_t = 2 does run dry
}

TEST_CASE("a PU that is always on and always detected leaves a pure harvest chain") {
  SystemConfig c;
  c.ideal_sensing = true;
  c.battery_cells = 30;
  SuProfile p;
  p.harvest_rate = 0.5;
  auto m = validate(c, {p});
  m.config.prior_idle = 0.0;
  m.derived.prior_busy = 1.0;
  const auto t = simulate(m, {{1.0, 0.0}}, opts(5000, 2, true));
  CHECK(t.users[0].transmissions == 0);
  CHECK(t.users[0].sensed_idle == 0);
  for (const auto& r : t.records) CHECK(r.after == std::min<long>(r.before + r.harvested, 30));
}

TEST_CASE("empirical transitions converge to the analytic columns") {
  const auto m = model(20, 3.0);
  const PolicyParams p{0.6, 0.3};
  const auto a = analyze_su(m, 0, p);
  const auto t = simulate(m, {p}, opts(1000000, 12));
  const auto emp = t.users[0].empirical_transition();
  // Expected TV for a column with ~15 reachable next states is about 0.012 at 1e4 visits
  // (pure sampling noise, shrinking as 1/sqrt(n)), so the 0.01 bound is applied from 1e5 visits.
  int checked = 0;
  for (int j = 0; j <= 20; ++j) {
    if (t.users[0].state_counts[j] < 100000) continue;
    ++checked;
    CHECK(0.5 * (emp.col(j) - a.chain.transition.col(j)).cwiseAbs().sum() < 0.01);
  }
  CHECK(checked >= 3);
}

TEST_CASE("compare passes on the model's own trace and catches a perturbed policy") {
  const auto m = model(40, 8.0);
  const PolicyParams p{0.35, 0.2};
  const auto trace = simulate(m, {p}, opts(400000, 21));
  const auto report = compare(trace, {AnalyticSummary::from(analyze_su(m, 0, p))});
  CHECK(report.sufficient_samples);
  CHECK(report.pass);
  CHECK(report.items.size() == 6);
  const auto wrong = compare(trace, {AnalyticSummary::from(analyze_su(m, 0, {0.45, 0.2}))});
  CHECK_FALSE(wrong.pass);
  const auto rate = std::find_if(wrong.items.begin(), wrong.items.end(), [](const CompareItem& i) { return i.quantity == "rate"; });
  REQUIRE(rate != wrong.items.end());
  CHECK_FALSE(rate->pass);
}

TEST_CASE("an empty trace is reported as insufficient") {
  SimTrace empty;
  const auto r = compare(empty, {});
  CHECK_FALSE(r.sufficient_samples);
  CHECK_FALSE(r.pass);
  CHECK(r.note.find("insufficient") != std::string::npos);
  CHECK_THROWS_AS(simulate(model(), {{0.35, 0.2}}, opts(0)), std::invalid_argument);
}

TEST_CASE("clamp mode probes on an empty battery") {
  const auto m = model(10, 0.5, 3);
  SimOptions o = opts(20000, 5);
  o.clamp_probe = true;
  const auto t = simulate(m, {{0.9, 0.1}}, o);
  CHECK(t.users[0].skipped_probes == 0);
  CHECK(t.users[0].underflow_events > 0);
}
