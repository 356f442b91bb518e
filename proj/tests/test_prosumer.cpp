#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "prosim/prosumer.hpp"

using namespace prosim;

namespace {

BatterySpec test_battery() {
  BatterySpec b;
  b.b_min_kwh = 0.0;
  b.b_max_kwh = 2.0;
  b.b0_kwh = 1.0;
  b.ramp_min_kw = -1.0;
  b.ramp_max_kw = 1.0;
  b.eta_ch = 0.95;
  b.eta_dis = 0.95;
  return b;
}

}  // namespace

TEST_CASE("battery power conversion matches hand values") {
  const BatterySpec b = test_battery();
  CHECK(battery_power(0.0, b, 0.25) == 0.0);
  CHECK(battery_power(0.25, b, 0.25) ==
        Catch::Approx(0.25 / (0.25 * 0.95)));  // 1.0526... kW charging
  CHECK(battery_power(-0.25, b, 0.25) == Catch::Approx(-0.95));
}

TEST_CASE("energy from power inverts the conversion") {
  const BatterySpec b = test_battery();
  CHECK(battery_energy_from_power(0.0, b, 0.25) == 0.0);
  CHECK(battery_energy_from_power(0.25 / (0.25 * 0.95), b, 0.25) ==
        Catch::Approx(0.25));
  CHECK(battery_energy_from_power(-0.95, b, 0.25) == Catch::Approx(-0.25));
}

TEST_CASE("round trip power -> energy -> power is exact") {
  const BatterySpec b = test_battery();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pw(-0.95, 1.0 / 0.95);
  for (int k = 0; k < 1000; ++k) {
    const double p = pw(rng);
    const double x = battery_energy_from_power(p, b, 0.25);
    CHECK(battery_power(x, b, 0.25) == Catch::Approx(p).margin(1e-12));
  }
}

TEST_CASE("battery power is monotone with a kink only at zero") {
  const BatterySpec b = test_battery();
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> xs(-0.25, 0.25);
  double prev_x = -0.25, prev_p = battery_power(-0.25, b, 0.25);
  std::vector<double> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(xs(rng));
  std::sort(pts.begin(), pts.end());
  for (double x : pts) {
    const double p = battery_power(x, b, 0.25);
    CHECK(p >= prev_p - 1e-12);
    // slope is 1/(h*eta) above zero and eta/h below: check within a segment
    if (x > 0 && prev_x > 0)
      CHECK((p - prev_p) == Catch::Approx((x - prev_x) / (0.25 * 0.95)));
    if (x < 0 && prev_x < 0)
      CHECK((p - prev_p) == Catch::Approx((x - prev_x) * 0.95 / 0.25));
    prev_x = x;
    prev_p = p;
  }
}

TEST_CASE("out-of-ramp energy delta is a domain error") {
  const BatterySpec b = test_battery();
  CHECK_THROWS_AS(battery_power(0.3, b, 0.25), std::domain_error);
  CHECK_THROWS_AS(battery_power(-0.3, b, 0.25), std::domain_error);
}

TEST_CASE("xC-yC shorthand expands to ramp limits") {
  const BatterySpec b = make_battery_c_rate(2.0, 1.0, 1.0, 0.0, 0.95, 0.95);
  CHECK(b.ramp_max_kw == Catch::Approx(2.0));
  CHECK(b.ramp_min_kw == Catch::Approx(-2.0));
  const BatterySpec half = make_battery_c_rate(1.0, 0.5, 0.5, 0.5, 1.0, 1.0);
  CHECK(half.ramp_max_kw == Catch::Approx(0.5));
  CHECK(half.ramp_min_kw == Catch::Approx(-0.5));
}

TEST_CASE("spec validation rejects broken parameters") {
  BatterySpec b = test_battery();
  b.b0_kwh = 5.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = test_battery();
  b.eta_ch = 0.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);

  TimeGrid g;
  g.steps = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = TimeGrid{};
  CHECK(g.inner_hours() == Catch::Approx(1.0 / 60.0));
  CHECK(g.inner_steps_total() == 1440);

  PriceSeries p;
  p.buy = {1.0};
  p.sell = {2.0};
  CHECK_THROWS_AS(p.validate(1), std::invalid_argument);
}

TEST_CASE("flexibility envelope must be able to reach K") {
  FlexibilitySpec f;
  f.y_min_kw = {0.0, 0.0};
  f.y_max_kw = {1.0, 1.0};
  f.target_kwh = 0.4;
  f.epsilon_kwh = 1e-6;
  CHECK_NOTHROW(f.validate(2, 0.25));  // max 0.5 kWh reachable
  f.target_kwh = 0.6;
  CHECK_THROWS_AS(f.validate(2, 0.25), std::invalid_argument);
}
