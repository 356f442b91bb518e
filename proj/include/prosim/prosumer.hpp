#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace prosim {

// Two timescales: N outer steps of h hours (energy optimization) and
// inner_per_outer fast steps of h_fast hours within each (voltage control).
struct TimeGrid {
  std::size_t steps = 96;          // N
  double step_hours = 0.25;        // h
  std::size_t inner_per_outer = 15;
  double inner_hours() const { return step_hours / inner_per_outer; }
  std::size_t inner_steps_total() const { return steps * inner_per_outer; }
  double horizon_hours() const { return steps * step_hours; }

  void validate() const {
    if (steps == 0) throw std::invalid_argument("timegrid: N must be >= 1");
    if (!(step_hours > 0.0))
      throw std::invalid_argument("timegrid: step duration must be positive");
    if (inner_per_outer == 0)
      throw std::invalid_argument("timegrid: inner_per_outer must be >= 1");
  }
};

// Battery energy capacity window, ramp limits and conversion efficiencies.
// Positive power means charging (consumption from the grid side).
struct BatterySpec {
  double b_min_kwh = 0.0;
  double b_max_kwh = 0.0;
  double b0_kwh = 0.0;
  double ramp_min_kw = 0.0;  // delta_min <= 0
  double ramp_max_kw = 0.0;  // delta_max >= 0
  double eta_ch = 1.0;
  double eta_dis = 1.0;

  double x_min_kwh(double h) const { return ramp_min_kw * h; }
  double x_max_kwh(double h) const { return ramp_max_kw * h; }

  void validate() const {
    if (!(b_min_kwh <= b0_kwh && b0_kwh <= b_max_kwh))
      throw std::invalid_argument("battery: b0 outside [b_min, b_max]");
    if (!(ramp_min_kw <= 0.0 && 0.0 <= ramp_max_kw))
      throw std::invalid_argument("battery: ramp bounds must bracket zero");
    if (!(eta_ch > 0.0 && eta_ch <= 1.0 && eta_dis > 0.0 && eta_dis <= 1.0))
      throw std::invalid_argument("battery: efficiencies must be in (0,1]");
  }
};

// "xC-yC" shorthand: full charge in 1/x hours, full discharge in 1/y hours.
inline BatterySpec make_battery_c_rate(double capacity_kwh, double c_charge,
                                       double c_discharge, double b0_kwh,
                                       double eta_ch, double eta_dis) {
  BatterySpec spec;
  spec.b_min_kwh = 0.0;
  spec.b_max_kwh = capacity_kwh;
  spec.b0_kwh = b0_kwh;
  spec.ramp_max_kw = c_charge * capacity_kwh;
  spec.ramp_min_kw = -c_discharge * capacity_kwh;
  spec.eta_ch = eta_ch;
  spec.eta_dis = eta_dis;
  spec.validate();
  return spec;
}

// Flexible-load envelopes (kW per step) plus the cumulative energy target K
// with slack epsilon, both in kWh.
struct FlexibilitySpec {
  std::vector<double> y_min_kw;
  std::vector<double> y_max_kw;
  double target_kwh = 0.0;  // K
  double epsilon_kwh = 0.0;

  static double default_epsilon(double target_kwh) {
    return std::max(1e-6, 1e-4 * std::fabs(target_kwh));
  }

  void validate(std::size_t n, double h) const {
    if (y_min_kw.size() != n || y_max_kw.size() != n)
      throw std::invalid_argument("flexibility: envelope length mismatch");
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(y_min_kw[i] >= 0.0) || !(y_min_kw[i] <= y_max_kw[i]))
        throw std::invalid_argument(
            "flexibility: need 0 <= y_min <= y_max at step " +
            std::to_string(i));
      lo += y_min_kw[i];
      hi += y_max_kw[i];
    }
    if (h * lo > target_kwh + epsilon_kwh + 1e-12 ||
        h * hi < target_kwh - epsilon_kwh - 1e-12)
      throw std::invalid_argument(
          "flexibility: envelope cannot meet cumulative target K");
  }
};

struct PriceSeries {
  std::vector<double> buy;   // p_b, currency per kWh
  std::vector<double> sell;  // p_s

  void validate(std::size_t n) const {
    if (buy.size() != n || sell.size() != n)
      throw std::invalid_argument("prices: series length mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (sell[i] > buy[i] + 1e-12)
        throw std::invalid_argument(
            "prices: selling price exceeds buying price at step " +
            std::to_string(i) + " (kappa > 1 breaks convexity)");
  }
};

// Per-step inelastic load d, renewable generation r and prices. The net
// uncontrolled load z = d - r is derived, never stored.
struct ScenarioSeries {
  std::vector<double> load_kw;  // d
  std::vector<double> gen_kw;   // r
  PriceSeries prices;

  double net_kw(std::size_t i) const { return load_kw[i] - gen_kw[i]; }

  void validate(std::size_t n) const {
    if (load_kw.size() != n || gen_kw.size() != n)
      throw std::invalid_argument("series: length mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (load_kw[i] < 0.0 || gen_kw[i] < 0.0)
        throw std::invalid_argument("series: d and r must be nonnegative");
    prices.validate(n);
  }
};

struct InverterSpec {
  double s_max_kva = 0.0;
  double p_max_kw = 0.0;  // <= s_max
  double pf_wc = 1.0;     // worst-case power factor

  void validate() const {
    if (!(p_max_kw > 0.0 && p_max_kw <= s_max_kva))
      throw std::invalid_argument("inverter: need 0 < p_max <= s_max");
    if (!(pf_wc > 0.0 && pf_wc <= 1.0))
      throw std::invalid_argument("inverter: pf_wc must be in (0,1]");
  }
};

// Grid-side battery power for a stored-energy change of x kWh over dur
// hours. Charging draws x/(dur*eta_ch); discharging returns eta_dis*x/dur.
inline double battery_power(double x_kwh, const BatterySpec& spec,
                            double dur_hours) {
  const double slack = 1e-9 * (1.0 + std::fabs(x_kwh));
  if (x_kwh < spec.x_min_kwh(dur_hours) - slack ||
      x_kwh > spec.x_max_kwh(dur_hours) + slack)
    throw std::domain_error("battery_power: energy delta outside ramp range");
  if (x_kwh >= 0.0) return x_kwh / (dur_hours * spec.eta_ch);
  return spec.eta_dis * x_kwh / dur_hours;
}

// Exact inverse of battery_power.
inline double battery_energy_from_power(double power_kw,
                                        const BatterySpec& spec,
                                        double dur_hours) {
  if (power_kw >= 0.0) return power_kw * dur_hours * spec.eta_ch;
  return power_kw * dur_hours / spec.eta_dis;
}

}  // namespace prosim
