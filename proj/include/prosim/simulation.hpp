#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "prosim/arbitrage.hpp"
#include "prosim/inverter.hpp"
#include "prosim/metrics.hpp"
#include "prosim/powerflow.hpp"
#include "prosim/prosumer.hpp"

namespace prosim {

struct ProsumerConfig {
  ScenarioSeries series;
  BatterySpec battery;
  FlexibilitySpec flex;
  InverterSpec inverter;
};

// One closed-loop study: a feeder, a prosumer per load node, one node under
// optimization at a time, and a control policy. Background nodes keep their
// static profiles. The seed only matters to synthetic data generation and is
// carried for the report echo.
struct Scenario {
  FeederModel feeder;
  std::map<int, ProsumerConfig> prosumers;
  int active_node = 2;
  Policy policy = Policy::None;
  VoltageRuleParams rules;
  TimeGrid grid;
  std::uint64_t seed = 0;

  void validate() const {
    grid.validate();
    feeder.validate();
    rules.validate();
    if (!prosumers.count(active_node))
      throw std::invalid_argument("scenario: active node has no prosumer");
    for (const auto& [node, pc] : prosumers) {
      if (node < 2 || node > feeder.node_count)
        throw std::invalid_argument("scenario: prosumer node out of range");
      pc.series.validate(grid.steps);
      pc.battery.validate();
      pc.flex.validate(grid.steps, grid.step_hours);
      pc.inverter.validate();
    }
  }
};

struct NodeTraces {
  std::vector<double> u_pu;
  std::vector<double> p_inv_kw;
  std::vector<double> q_inv_kvar;
  std::vector<double> p_curt_kw;
  std::vector<double> p_b_kw;
  std::vector<double> soc_kwh;
};

struct PhaseTimings {
  double arbitrage_total_s = 0.0;
  double powerflow_total_s = 0.0;
  double inner_loop_total_s = 0.0;
  double wall_s = 0.0;
};

struct SimulationResult {
  int active_node = 0;
  Policy policy = Policy::None;
  std::map<int, NodeTraces> traces;      // full traces for the active node,
                                         // voltage-only for background nodes
  std::vector<double> sched_x_kwh;       // realized first-step plan per outer
  std::vector<double> sched_y_kw;
  MetricsBundle metrics;                 // active node
  std::map<int, std::array<long long, 4>> vci_per_node;
  std::map<int, double> cvc_per_node;
  PhaseTimings timings;
};

namespace detail {

inline double nominal_flex_kw(const ProsumerConfig& pc, std::size_t i) {
  return 0.5 * (pc.flex.y_min_kw[i] + pc.flex.y_max_kw[i]);
}

// Background prosumers run no optimization: inelastic load plus the nominal
// flexible consumption minus generation.
inline double background_net_kw(const ProsumerConfig& pc, std::size_t i) {
  return pc.series.net_kw(i) + nominal_flex_kw(pc, i);
}

inline ArbitrageInputs tail_inputs(const Scenario& scn, std::size_t from,
                                   double b_now_kwh, double k_rem_kwh) {
  const auto& pc = scn.prosumers.at(scn.active_node);
  const std::size_t n = scn.grid.steps;
  ArbitrageInputs in;
  in.grid = scn.grid;
  in.grid.steps = n - from;
  in.battery = pc.battery;
  in.battery.b0_kwh = b_now_kwh;
  in.flex.y_min_kw.assign(pc.flex.y_min_kw.begin() + from,
                          pc.flex.y_min_kw.end());
  in.flex.y_max_kw.assign(pc.flex.y_max_kw.begin() + from,
                          pc.flex.y_max_kw.end());
  in.flex.epsilon_kwh = pc.flex.epsilon_kwh;
  // Remaining budget, clamped into what the remaining envelopes can reach.
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = from; i < n; ++i) {
    lo += pc.flex.y_min_kw[i];
    hi += pc.flex.y_max_kw[i];
  }
  const double h = scn.grid.step_hours;
  in.flex.target_kwh =
      std::clamp(k_rem_kwh, h * lo - in.flex.epsilon_kwh,
                 h * hi + in.flex.epsilon_kwh);
  in.series.load_kw.assign(pc.series.load_kw.begin() + from,
                           pc.series.load_kw.end());
  in.series.gen_kw.assign(pc.series.gen_kw.begin() + from,
                          pc.series.gen_kw.end());
  in.series.prices.buy.assign(pc.series.prices.buy.begin() + from,
                              pc.series.prices.buy.end());
  in.series.prices.sell.assign(pc.series.prices.sell.begin() + from,
                               pc.series.prices.sell.end());
  return in;
}

}  // namespace detail

// Full Algorithm-1 day: receding-horizon arbitrage at the outer step, one
// power flow + envelope + dispatch per inner minute, battery state carried
// across both loops. Voltage control is open loop: the envelope at minute k
// reacts to the voltage caused by minute k-1's dispatch (the first minute of
// the day sees the pre-dispatch flow with the scheduled inverter output).
inline SimulationResult run_day(const Scenario& scn) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  scn.validate();

  const auto& active = scn.prosumers.at(scn.active_node);
  const std::size_t n = scn.grid.steps;
  const std::size_t inner = scn.grid.inner_per_outer;
  const double h = scn.grid.step_hours;
  const double h_fast = scn.grid.inner_hours();
  const int nodes = scn.feeder.node_count;

  SimulationResult res;
  res.active_node = scn.active_node;
  res.policy = scn.policy;
  for (int node = 1; node <= nodes; ++node) {
    NodeTraces tr;
    tr.u_pu.reserve(n * inner);
    if (node == scn.active_node) {
      tr.p_inv_kw.reserve(n * inner);
      tr.q_inv_kvar.reserve(n * inner);
      tr.p_curt_kw.reserve(n * inner);
      tr.p_b_kw.reserve(n * inner);
      tr.soc_kwh.reserve(n * inner);
    }
    res.traces.emplace(node, std::move(tr));
  }

  // The rating box; P_max is pinned to S_max for control purposes.
  const double p_box = active.inverter.s_max_kva;
  InverterSpec inv = active.inverter;
  inv.p_max_kw = p_box;

  double b_now = active.battery.b0_kwh;
  double k_rem = active.flex.target_kwh;
  double last_p_inv = 0.0, last_q_inv = 0.0;
  bool have_dispatch = false;
  double arb_s = 0.0, pf_s = 0.0, inner_s = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto t_arb0 = clock::now();
    const ArbitrageInputs tail = detail::tail_inputs(scn, i, b_now, k_rem);
    Schedule sched;
    try {
      sched = solve_arbitrage(tail);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_day: arbitrage failed at outer step " +
                               std::to_string(i) + ": " + e.what());
    }
    arb_s += std::chrono::duration<double>(clock::now() - t_arb0).count();

    const double x_i = sched.x_kwh.front();
    const double y_i = sched.y_kw.front();
    const double r_i = active.series.gen_kw[i];
    const double d_i = active.series.load_kw[i];
    const double zeta = battery_power(x_i, active.battery, h) - r_i;
    res.sched_x_kwh.push_back(x_i);
    res.sched_y_kw.push_back(y_i);
    if (!have_dispatch) {
      last_p_inv = zeta;  // pre-dispatch output for the first power flow
      last_q_inv = 0.0;
      have_dispatch = true;
    }

    const auto t_inner0 = clock::now();
    for (std::size_t k = 0; k < inner; ++k) {
      const auto t_pf0 = clock::now();
      NodalInjection injection;
      injection.p_kw.assign(nodes, 0.0);
      injection.q_kvar.assign(nodes, 0.0);
      for (const auto& [node, pc] : scn.prosumers) {
        if (node == scn.active_node) continue;
        injection.p_kw[node - 1] = detail::background_net_kw(pc, i);
      }
      injection.p_kw[scn.active_node - 1] = d_i + y_i + last_p_inv;
      injection.q_kvar[scn.active_node - 1] = -last_q_inv;

      const VoltageSolution pf = backward_forward_sweep(scn.feeder, injection);
      pf_s += std::chrono::duration<double>(clock::now() - t_pf0).count();
      if (!pf.converged)
        throw std::runtime_error("run_day: power flow diverged at minute " +
                                 std::to_string(i * inner + k));
      for (int node = 1; node <= nodes; ++node)
        res.traces[node].u_pu.push_back(pf.v_mag_pu[node - 1]);

      const double u = pf.v_mag_pu[scn.active_node - 1];
      Envelope env{-p_box, p_box, 0.0, 0.0};
      const Envelope p_only =
          envelope(scn.policy, u, scn.rules, -p_box, p_box, 0.0, 0.0);
      const double p_ref = std::clamp(zeta, p_only.p_min, p_only.p_max);
      const double q_box = q_capability(p_ref, inv);
      env = envelope(scn.policy, u, scn.rules, -p_box, p_box, -q_box, q_box);

      const DispatchResult dr = inverter_control_step(
          zeta, r_i, b_now, env, active.battery, inv, h_fast);
      b_now += battery_energy_from_power(dr.p_b_kw, active.battery, h_fast);

      auto& tr = res.traces[scn.active_node];
      tr.p_inv_kw.push_back(dr.p_inv_kw);
      tr.q_inv_kvar.push_back(dr.q_inv_kvar);
      tr.p_curt_kw.push_back(dr.p_curt_kw);
      tr.p_b_kw.push_back(dr.p_b_kw);
      tr.soc_kwh.push_back(b_now);
      last_p_inv = dr.p_inv_kw;
      last_q_inv = dr.q_inv_kvar;
    }
    inner_s += std::chrono::duration<double>(clock::now() - t_inner0).count();

    k_rem -= h * y_i;
  }

  // Metrics for the active node; voltage indices for every node.
  const auto& tr = res.traces[scn.active_node];
  res.metrics.cost_wic = cost_without_inverter_control(
      res.sched_x_kwh, res.sched_y_kw, active.series, active.battery,
      scn.grid);
  res.metrics.cost_inv = cost_with_inverter_control(
      tr.p_b_kw, tr.p_curt_kw, res.sched_y_kw, active.series, scn.grid);
  std::tie(res.metrics.lcg_abs, res.metrics.lcg_pct) =
      lcg(res.metrics.cost_inv, res.metrics.cost_wic);
  res.metrics.tce_kwh = tce(tr.p_curt_kw, scn.grid);
  res.metrics.vci = vci(tr.u_pu, scn.rules);
  res.metrics.cvc = cvc(tr.u_pu, scn.rules);
  for (int node = 1; node <= nodes; ++node) {
    res.vci_per_node[node] = vci(res.traces[node].u_pu, scn.rules);
    res.cvc_per_node[node] = cvc(res.traces[node].u_pu, scn.rules);
  }

  res.timings.arbitrage_total_s = arb_s;
  res.timings.powerflow_total_s = pf_s;
  res.timings.inner_loop_total_s = inner_s;
  res.timings.wall_s =
      std::chrono::duration<double>(clock::now() - t_start).count();
  return res;
}

enum class SweepParam { Kappa, InverterKva, FlexPct, Node, PolicyKind };

struct SweepValue {
  double number = 0.0;     // kappa / kVA / percent / node id
  Policy policy = Policy::None;  // for PolicyKind sweeps
  std::string label;
};

struct SweepPoint {
  SweepValue value;
  bool ok = false;
  std::string error;
  SimulationResult result;  // valid iff ok
};

// Apply one sweep value to a copy of the base scenario.
inline Scenario apply_sweep_value(const Scenario& base, SweepParam param,
                                  const SweepValue& v) {
  Scenario scn = base;
  switch (param) {
    case SweepParam::Kappa: {
      for (auto& [node, pc] : scn.prosumers)
        for (std::size_t i = 0; i < pc.series.prices.buy.size(); ++i)
          pc.series.prices.sell[i] = v.number * pc.series.prices.buy[i];
      break;
    }
    case SweepParam::InverterKva: {
      for (auto& [node, pc] : scn.prosumers) {
        pc.inverter.s_max_kva = v.number;
        pc.inverter.p_max_kw = v.number;
      }
      break;
    }
    case SweepParam::FlexPct: {
      // A share a of the inelastic load becomes flexible: envelopes 0 to
      // 2*a*d, target = the displaced energy, load scaled to (1-a)*d.
      const double a = v.number / 100.0;
      const double h = scn.grid.step_hours;
      for (auto& [node, pc] : scn.prosumers) {
        double k = 0.0;
        const std::size_t n = pc.series.load_kw.size();
        pc.flex.y_min_kw.assign(n, 0.0);
        pc.flex.y_max_kw.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double flex_kw = a * pc.series.load_kw[i];
          pc.flex.y_max_kw[i] = 2.0 * flex_kw;
          k += h * flex_kw;
          pc.series.load_kw[i] -= flex_kw;
        }
        pc.flex.target_kwh = k;
        pc.flex.epsilon_kwh = FlexibilitySpec::default_epsilon(k);
      }
      break;
    }
    case SweepParam::Node:
      scn.active_node = static_cast<int>(v.number);
      break;
    case SweepParam::PolicyKind:
      scn.policy = v.policy;
      break;
  }
  return scn;
}

// Independent runs over the sweep values, in the given order. A failing
// point is recorded and the sweep continues.
inline std::vector<SweepPoint> run_sweep(const Scenario& base,
                                         SweepParam param,
                                         const std::vector<SweepValue>& values) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (const auto& v : values) {
    SweepPoint pt;
    pt.value = v;
    try {
      const Scenario scn = apply_sweep_value(base, param, v);
      pt.result = run_day(scn);
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    points.push_back(std::move(pt));
  }
  return points;
}

}  // namespace prosim
