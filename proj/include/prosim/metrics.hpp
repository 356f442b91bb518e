#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prosim/inverter.hpp"
#include "prosim/prosumer.hpp"

namespace prosim {

struct MetricsBundle {
  double cost_wic = 0.0;          // billed cost of the schedule alone
  double cost_inv = 0.0;          // billed cost with inverter control applied
  double lcg_abs = 0.0;
  double lcg_pct = 0.0;
  double tce_kwh = 0.0;
  std::array<long long, 4> vci{}; // >u_max, >1+delta, <1-delta, <u_min
  double cvc = 0.0;
};

// Billed cost of the slow-timescale schedule, no fast-timescale effects.
inline double cost_without_inverter_control(const std::vector<double>& x_kwh,
                                            const std::vector<double>& y_kw,
                                            const ScenarioSeries& series,
                                            const BatterySpec& battery,
                                            const TimeGrid& grid) {
  const std::size_t n = grid.steps;
  if (x_kwh.size() != n || y_kw.size() != n)
    throw std::invalid_argument("metrics: schedule length mismatch");
  const double h = grid.step_hours;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double net = series.load_kw[i] + y_kw[i] - series.gen_kw[i] +
                       battery_power(x_kwh[i], battery, h);
    total += h * (net >= 0.0 ? series.prices.buy[i] * net
                             : series.prices.sell[i] * net);
  }
  return total;
}

// Billed cost with the fast-timescale battery and curtailment traces: each
// outer step is billed on d + y - r plus the inner-minute average of
// P_B + P_curt.
inline double cost_with_inverter_control(const std::vector<double>& p_b_trace,
                                         const std::vector<double>& p_curt_trace,
                                         const std::vector<double>& y_kw,
                                         const ScenarioSeries& series,
                                         const TimeGrid& grid) {
  const std::size_t n = grid.steps;
  const std::size_t inner = grid.inner_per_outer;
  if (p_b_trace.size() != n * inner || p_curt_trace.size() != n * inner)
    throw std::invalid_argument("metrics: trace length mismatch");
  if (y_kw.size() != n)
    throw std::invalid_argument("metrics: schedule length mismatch");
  const double h = grid.step_hours;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double avg = 0.0;
    for (std::size_t k = 0; k < inner; ++k)
      avg += p_b_trace[i * inner + k] + p_curt_trace[i * inner + k];
    avg /= static_cast<double>(inner);
    const double net = series.load_kw[i] + y_kw[i] - series.gen_kw[i] + avg;
    total += h * (net >= 0.0 ? series.prices.buy[i] * net
                             : series.prices.sell[i] * net);
  }
  return total;
}

// Loss of consumer gain: absolute and as a percentage of the unrestricted
// bill's magnitude.
inline std::pair<double, double> lcg(double cost_inv, double cost_wic) {
  const double abs = cost_inv - cost_wic;
  const double base = std::fabs(cost_wic);
  const double pct = base > 0.0 ? abs / base * 100.0 : 0.0;
  return {abs, pct};
}

// Total curtailed energy in kWh over the fast-timescale trace.
inline double tce(const std::vector<double>& p_curt_trace,
                  const TimeGrid& grid) {
  double sum = 0.0;
  for (double p : p_curt_trace) sum += p;
  return sum * grid.inner_hours();
}

inline std::array<long long, 4> vci(const std::vector<double>& u_trace,
                                    const VoltageRuleParams& params) {
  std::array<long long, 4> counts{0, 0, 0, 0};
  for (double u : u_trace) {
    if (u > params.u_max) ++counts[0];
    if (u > 1.0 + params.delta_perm) ++counts[1];
    if (u < 1.0 - params.delta_perm) ++counts[2];
    if (u < params.u_min) ++counts[3];
  }
  return counts;
}

// Cumulative voltage correction: integrated exceedance beyond the
// permissible band, in p.u.-samples.
inline double cvc(const std::vector<double>& u_trace,
                  const VoltageRuleParams& params) {
  double sum = 0.0;
  const double hi = 1.0 + params.delta_perm;
  const double lo = 1.0 - params.delta_perm;
  for (double u : u_trace) {
    if (u > hi) sum += u - hi;
    if (u < lo) sum += lo - u;
  }
  return sum;
}

}  // namespace prosim
