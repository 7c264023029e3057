#include <doctest.h>

#include <cmath>

#include "ehcr/config_io.hpp"

using namespace ehcr;

namespace {

const char* kThreeUsers = R"(# Fig. 10 style network
[system]
sampling_frequency = 100e3   # fs
battery_cells = 60
interference_cap = inf

[su.1]
su_ap_var = 2
pu_su_var = 1
su_pu_var = 1

[su.2]
su_ap_var = 2.2
pu_su_var = 0.8
su_pu_var = 0.5
omega = 0.4
theta = 0.15

[su.3]
su_ap_var = 2.1

[search]
grid_omega = 11
refine = 2
)";

std::string first_issue(std::string_view text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.issues().front();
  }
  return {};
}

} // namespace

TEST_CASE("parses sections, comments and defaults") {
  const auto c = parse_config(kThreeUsers);
  CHECK(c.system.sampling_frequency == 100e3);
  CHECK(c.system.battery_cells == 60);
  CHECK(std::isinf(c.system.interference_cap));
  REQUIRE(c.profiles.size() == 3);
  CHECK(c.profiles[1].su_pu_var == 0.5);
  CHECK(c.profiles[2].su_ap_var == 2.1);
  CHECK(c.profiles[2].harvest_rate == 15.0);
  CHECK(c.policies[1].omega == 0.4);
  CHECK(c.policies[0].omega == 0.35);
  CHECK(c.policies[0].theta == 0.2);
  CHECK(c.search.grid_omega == 11);
  CHECK(c.search.refine_levels == 2);
  CHECK(c.search.grid_theta == 25);
}

TEST_CASE("round trip through the formatter is exact") {
  auto c = parse_config(kThreeUsers);
  c.system.slot_duration = 0.1 + 0.2; // not exactly representable in short decimal
  const auto again = parse_config(format_config(c));
  CHECK(again.system.slot_duration == c.system.slot_duration);
  CHECK(format_config(again) == format_config(c));
}

TEST_CASE("diagnostics carry line numbers") {
  CHECK(first_issue("[system]\nbattery_cells = 8.5\n[su.1]\n") == "cfg:2: bad value '8.5' for 'battery_cells'");
  CHECK(first_issue("[system]\n\n  colour = red\n[su.1]\n") == "cfg:3: unknown key 'colour' in [system]");
  CHECK(first_issue("[su.1]\nomega = 1.5\n") == "cfg:2: omega must lie in [0,1]");
  CHECK(first_issue("[su.1]\nrho\n") == "cfg:2: expected 'key = value'");
  CHECK(first_issue("[su.1]\n[su.1]\n").find("cfg:2: duplicate section") == 0);
  CHECK(first_issue("[su.1]\nomega = 0.1\nomega = 0.2\n").find("cfg:3: duplicate key 'omega'") == 0);
  CHECK(first_issue("[nonsense]\n[su.1]\n") == "cfg:1: unknown section [nonsense]");
  CHECK(first_issue("[su.2]\n") == "cfg: missing section [su.1]");
  CHECK(first_issue("[system]\n") == "cfg: no [su.N] sections");
  CHECK(first_issue("x = 1\n[su.1]\n") == "cfg:1: key 'x' outside a known section");
}

TEST_CASE("all problems are collected") {
  try {
    parse_config("[system]\nfoo = 1\nbar = 2\n[su.1]\nomega = x\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 3);
  }
}

TEST_CASE("numbers do not depend on the locale") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(1e300) == "1e+300");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(parse_config("[system]\nbandwidth = 1.5e4\n[su.1]\n").system.bandwidth == 15000.0);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent/ehcr.cfg"), ConfigError); }
