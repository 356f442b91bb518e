#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "prosim/lp.hpp"
#include "prosim/prosumer.hpp"

namespace prosim {

// Inputs for one slow-timescale arbitrage solve. Under receding-horizon use
// the grid/series cover the remaining steps, battery.b0 carries the realized
// charge and flex.target_kwh the remaining energy budget.
struct ArbitrageInputs {
  TimeGrid grid;
  BatterySpec battery;
  FlexibilitySpec flex;
  ScenarioSeries series;

  void validate() const {
    grid.validate();
    battery.validate();
    flex.validate(grid.steps, grid.step_hours);
    series.validate(grid.steps);
  }
};

struct Schedule {
  std::vector<double> x_kwh;       // battery energy delta per step
  std::vector<double> y_kw;        // flexible load per step
  std::vector<double> t_currency;  // epigraph value = step cost
  double objective = 0.0;          // total cost over the horizon
};

// The curve p_b*[E]^+ - p_s*[E]^-, with E the grid-side step energy
// z*h + y*h + x/eta (charging) or z*h + y*h + eta*x (discharging), is the
// pointwise max of four lines in (x, y). Each step contributes one epigraph
// variable t_i bounded below by all four, giving a (6N+2) x 3N program:
// 4N segment rows, 2N running battery-capacity rows, 2 cumulative
// flexibility rows. Variable order is [x_1..x_N, y_1..y_N, t_1..t_N]; the
// y block carries per-step energy so row coefficients stay plain prices.
inline StandardLP build_arbitrage_lp(const ArbitrageInputs& in) {
  in.validate();
  const std::size_t n = in.grid.steps;
  const double h = in.grid.step_hours;
  const auto& pb = in.series.prices.buy;
  const auto& ps = in.series.prices.sell;
  const double x_min = in.battery.x_min_kwh(h);
  const double x_max = in.battery.x_max_kwh(h);

  StandardLP lp;
  const std::size_t cols = 3 * n;
  lp.c.assign(cols, 0.0);
  for (std::size_t i = 0; i < n; ++i) lp.c[2 * n + i] = 1.0;

  lp.lb.assign(cols, 0.0);
  lp.ub.assign(cols, 0.0);
  double pb_max = 0.0, z_abs_max = 0.0, y_env_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp.lb[i] = x_min;
    lp.ub[i] = x_max;
    lp.lb[n + i] = h * in.flex.y_min_kw[i];
    lp.ub[n + i] = h * in.flex.y_max_kw[i];
    pb_max = std::max(pb_max, pb[i]);
    z_abs_max = std::max(z_abs_max, std::fabs(in.series.net_kw(i)));
    y_env_max = std::max(y_env_max, in.flex.y_max_kw[i]);
  }
  const double eta_min = std::min(in.battery.eta_ch, in.battery.eta_dis);
  const double ramp_abs =
      std::max(-in.battery.ramp_min_kw, in.battery.ramp_max_kw);
  const double t_bound = 10.0 * h * static_cast<double>(n) * pb_max *
                         (z_abs_max + y_env_max + ramp_abs / eta_min);
  for (std::size_t i = 0; i < n; ++i) {
    lp.lb[2 * n + i] = -t_bound;
    lp.ub[2 * n + i] = t_bound;
  }

  const std::size_t rows = 6 * n + 2;
  lp.A.assign(rows, std::vector<double>(cols, 0.0));
  lp.b.assign(rows, 0.0);

  const double eta_ch = in.battery.eta_ch;
  const double eta_dis = in.battery.eta_dis;
  for (std::size_t i = 0; i < n; ++i) {
    const double ze = h * in.series.net_kw(i);
    // Segment 1: buy while charging.
    lp.A[i][i] = pb[i] / eta_ch;
    lp.A[i][n + i] = pb[i];
    lp.A[i][2 * n + i] = -1.0;
    lp.b[i] = -ze * pb[i];
    // Segment 2: sell while discharging.
    lp.A[n + i][i] = ps[i] * eta_dis;
    lp.A[n + i][n + i] = ps[i];
    lp.A[n + i][2 * n + i] = -1.0;
    lp.b[n + i] = -ze * ps[i];
    // Segment 3: buy while discharging.
    lp.A[2 * n + i][i] = pb[i] * eta_dis;
    lp.A[2 * n + i][n + i] = pb[i];
    lp.A[2 * n + i][2 * n + i] = -1.0;
    lp.b[2 * n + i] = -ze * pb[i];
    // Segment 4: sell while charging.
    lp.A[3 * n + i][i] = ps[i] / eta_ch;
    lp.A[3 * n + i][n + i] = ps[i];
    lp.A[3 * n + i][2 * n + i] = -1.0;
    lp.b[3 * n + i] = -ze * ps[i];
  }

  // Running charge stays inside the capacity window: for every prefix,
  // sum x_j <= b_max - b0 and -sum x_j <= b0 - b_min.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      lp.A[4 * n + i][j] = 1.0;
      lp.A[5 * n + i][j] = -1.0;
    }
    lp.b[4 * n + i] = in.battery.b_max_kwh - in.battery.b0_kwh;
    lp.b[5 * n + i] = in.battery.b0_kwh - in.battery.b_min_kwh;
  }

  // Cumulative flexible energy within [K - eps, K + eps].
  for (std::size_t j = 0; j < n; ++j) {
    lp.A[6 * n][n + j] = 1.0;
    lp.A[6 * n + 1][n + j] = -1.0;
  }
  lp.b[6 * n] = in.flex.target_kwh + in.flex.epsilon_kwh;
  lp.b[6 * n + 1] = -in.flex.target_kwh + in.flex.epsilon_kwh;

  return lp;
}

inline Schedule solve_arbitrage(const ArbitrageInputs& in) {
  const StandardLP lp = build_arbitrage_lp(in);
  const LPSolution sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    // Validation rules out an infeasible program, so name the families we
    // checked to make an (unexpected) failure diagnosable.
    throw std::runtime_error(
        "arbitrage: LP not optimal (checked families: flexibility envelope "
        "vs K, battery capacity vs b0, ramp bounds); status=" +
        std::string(sol.status == LPStatus::Infeasible ? "infeasible"
                                                       : "unbounded"));
  }
  const std::size_t n = in.grid.steps;
  const double h = in.grid.step_hours;
  Schedule sched;
  sched.x_kwh.assign(sol.x.begin(), sol.x.begin() + n);
  sched.y_kw.resize(n);
  for (std::size_t i = 0; i < n; ++i) sched.y_kw[i] = sol.x[n + i] / h;
  sched.t_currency.assign(sol.x.begin() + 2 * n, sol.x.end());
  sched.objective = sol.objective;
  return sched;
}

// Direct evaluation of the piecewise cost the LP minimizes: buy positive net
// energy at p_b, sell negative net energy at p_s, battery converted through
// its efficiency curve.
inline double evaluate_cost(const Schedule& sched, const ArbitrageInputs& in) {
  const std::size_t n = in.grid.steps;
  const double h = in.grid.step_hours;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double net_kw = in.series.net_kw(i) + sched.y_kw[i] +
                          battery_power(sched.x_kwh[i], in.battery, h);
    const double e = h * net_kw;
    total += e >= 0.0 ? in.series.prices.buy[i] * e
                      : in.series.prices.sell[i] * e;
  }
  return total;
}

// The four segment values at a point; the step cost is their maximum.
inline std::array<double, 4> segment_values(std::size_t i, double x_kwh,
                                            double y_kw,
                                            const ArbitrageInputs& in) {
  const double h = in.grid.step_hours;
  const double ze = h * in.series.net_kw(i);
  const double ye = h * y_kw;
  const double pb = in.series.prices.buy[i];
  const double ps = in.series.prices.sell[i];
  return {pb * (ze + ye + x_kwh / in.battery.eta_ch),
          ps * (ze + ye + x_kwh * in.battery.eta_dis),
          pb * (ze + ye + x_kwh * in.battery.eta_dis),
          ps * (ze + ye + x_kwh / in.battery.eta_ch)};
}

}  // namespace prosim
