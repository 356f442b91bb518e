#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "prosim/prosumer.hpp"

namespace prosim {

// Hard limits and permissible deviation splitting the voltage axis into five
// zones around the 1 p.u. nominal.
struct VoltageRuleParams {
  double u_min = 0.92;
  double u_max = 1.08;
  double delta_perm = 0.04;

  void validate() const {
    if (!(delta_perm > 0.0))
      throw std::invalid_argument("rules: delta_perm must be positive");
    if (!(u_min < 1.0 - delta_perm && 1.0 + delta_perm < u_max))
      throw std::invalid_argument(
          "rules: need u_min < 1-delta < 1+delta < u_max");
  }
};

enum class Zone { Z1, Z2, Z3, Z4, Z5 };

enum class Policy { None, PRC, ANRC, Hybrid };

inline Zone classify_zone(double u, const VoltageRuleParams& p) {
  if (u < p.u_min) return Zone::Z1;
  if (u < 1.0 - p.delta_perm) return Zone::Z2;
  if (u <= 1.0 + p.delta_perm) return Zone::Z3;
  if (u <= p.u_max) return Zone::Z4;
  return Zone::Z5;
}

// Permissible inverter operating ranges for one minute.
struct Envelope {
  double p_min = 0.0, p_max = 0.0;  // kW
  double q_min = 0.0, q_max = 0.0;  // kVAr
};

// Per-zone P/Q ranges. PRC pushes the voltage back (down to single-point
// ranges in Z1/Z5), ANRC only forbids aggravation, Hybrid takes the ANRC
// P rows with the PRC Q rows. Zone-2/4 rows are linear droops anchored on
// the hard-limit rows.
inline Envelope envelope(Policy policy, double u, const VoltageRuleParams& vp,
                         double p_min, double p_max, double q_min,
                         double q_max) {
  Envelope full{p_min, p_max, q_min, q_max};
  if (policy == Policy::None) return full;

  const Zone zone = classify_zone(u, vp);
  const double lo_edge = 1.0 - vp.delta_perm;
  const double hi_edge = 1.0 + vp.delta_perm;
  // In Z2 both ramp from 0 at the band edge to 1 at u_min; in Z4 from 0 at
  // the band edge to 1 at u_max. prc_* tracks distance from the band edge,
  // anrc_* distance from the hard limit.
  const double prc_low = (u - lo_edge) / (vp.u_min - lo_edge);
  const double anrc_low = (vp.u_min - u) / (vp.u_min - lo_edge);
  const double prc_high = (u - hi_edge) / (vp.u_max - hi_edge);
  const double anrc_high = (vp.u_max - u) / (vp.u_max - hi_edge);

  Envelope prc = full;
  switch (zone) {
    case Zone::Z1: prc = {p_min, p_min, q_max, q_max}; break;
    case Zone::Z2:
      prc = {p_min, p_min * prc_low, q_max * prc_low, q_max};
      break;
    case Zone::Z3: break;
    case Zone::Z4:
      prc = {p_max * prc_high, p_max, q_min, q_min * prc_high};
      break;
    case Zone::Z5: prc = {p_max, p_max, q_min, q_min}; break;
  }
  if (policy == Policy::PRC) return prc;

  Envelope anrc = full;
  switch (zone) {
    case Zone::Z1: anrc = {p_min, 0.0, 0.0, q_max}; break;
    case Zone::Z2:
      anrc = {p_min, p_max * anrc_low, q_min * anrc_low, q_max};
      break;
    case Zone::Z3: break;
    case Zone::Z4:
      anrc = {p_min * anrc_high, p_max, q_min, q_max * anrc_high};
      break;
    case Zone::Z5: anrc = {0.0, p_max, q_min, 0.0}; break;
  }
  if (policy == Policy::ANRC) return anrc;
  return {anrc.p_min, anrc.p_max, prc.q_min, prc.q_max};
}

// Reactive capability at a given active output: inside the power-factor
// wedge |Q| tracks |P| tan(acos pf); past it the VA circle binds; below a
// low-output ratio the wedge value is frozen so capability stays away from
// zero. The low-output threshold is a fraction of S_max.
inline double q_capability(double p_inv_kw, const InverterSpec& inv,
                           double low_ratio = 0.1) {
  const double s = inv.s_max_kva;
  if (std::fabs(p_inv_kw) > s * (1.0 + 1e-12))
    throw std::domain_error("q_capability: |P| exceeds S_max");
  const double ratio = std::min(std::fabs(p_inv_kw) / s, 1.0);
  const double tan_wc = std::tan(std::acos(inv.pf_wc));
  if (ratio > inv.pf_wc)
    return std::sqrt(std::max(0.0, s * s - p_inv_kw * p_inv_kw));
  if (ratio >= low_ratio) return std::fabs(p_inv_kw) * tan_wc;
  return low_ratio * s * tan_wc;
}

struct CurtailmentDispatch {
  double battery_kw = 0.0;
  double curtailed_kw = 0.0;
};

// Grid-side battery power range reachable within one fast step of 'step'
// hours given the current charge. Ramp limits bound the stored-energy rate,
// so they map to the grid side through the same efficiency factors as the
// capacity terms; any schedule-feasible x_i stays reachable here.
inline std::pair<double, double> battery_power_range(double b_prev_kwh,
                                                     const BatterySpec& bat,
                                                     double step_hours) {
  const double lo =
      bat.eta_dis *
      std::max(bat.ramp_min_kw, (bat.b_min_kwh - b_prev_kwh) / step_hours);
  const double hi =
      std::min(bat.ramp_max_kw, (bat.b_max_kwh - b_prev_kwh) / step_hours) /
      bat.eta_ch;
  return {lo, hi};
}

// Least PV curtailment that reaches the inverter target p_trgt:
//   min p_curt  s.t.  p_b - (r - p_curt) = p_trgt,  0 <= p_curt <= r,
// with p_b inside the reachable battery range. Closed form: push p_b as
// high as the range and the zero-curtailment point allow. Empty
// intersection of [p_trgt, p_trgt + r] with the battery range means the
// target is unreachable (nullopt -> fallback path).
inline std::optional<CurtailmentDispatch> min_curtailment_dispatch(
    double p_trgt_kw, double r_kw, double b_prev_kwh, const BatterySpec& bat,
    double step_hours) {
  if (r_kw < 0.0)
    throw std::domain_error("min_curtailment_dispatch: negative generation");
  if (b_prev_kwh < bat.b_min_kwh - 1e-9 || b_prev_kwh > bat.b_max_kwh + 1e-9)
    throw std::domain_error("min_curtailment_dispatch: charge out of range");
  const auto [pb_lo, pb_hi] = battery_power_range(b_prev_kwh, bat, step_hours);
  if (p_trgt_kw > pb_hi || p_trgt_kw + r_kw < pb_lo) return std::nullopt;
  CurtailmentDispatch d;
  d.battery_kw = std::min(pb_hi, p_trgt_kw + r_kw);
  d.curtailed_kw = std::clamp(p_trgt_kw + r_kw - d.battery_kw, 0.0, r_kw);
  return d;
}

struct DispatchResult {
  double p_curt_kw = 0.0;
  double p_b_kw = 0.0;
  double p_inv_kw = 0.0;
  double q_inv_kvar = 0.0;
  bool fallback_used = false;
};

// One fast-timescale control step. zeta is the scheduled inverter output
// f(x_i) - r_i. The scheduled P passes through when the envelope and the
// battery allow it; otherwise the nearest envelope bound becomes the target
// (P-priority) and the minimum-curtailment dispatch reaches it. When even
// that fails, charge flat out and curtail everything (positive target) or
// discharge flat out (negative target). Q follows the envelope nearest to
// zero and is clipped to what the VA rating and capability rule leave.
inline DispatchResult inverter_control_step(double zeta_kw, double r_kw,
                                            double b_prev_kwh,
                                            const Envelope& env,
                                            const BatterySpec& bat,
                                            const InverterSpec& inv,
                                            double step_hours) {
  const double p_trgt =
      std::clamp(zeta_kw, env.p_min, env.p_max);
  const double q_trgt = std::clamp(0.0, env.q_min, env.q_max);

  DispatchResult out;
  const auto dispatch =
      min_curtailment_dispatch(p_trgt, r_kw, b_prev_kwh, bat, step_hours);
  if (dispatch) {
    out.p_b_kw = dispatch->battery_kw;
    out.p_curt_kw = dispatch->curtailed_kw;
  } else {
    out.fallback_used = true;
    const auto [pb_lo, pb_hi] =
        battery_power_range(b_prev_kwh, bat, step_hours);
    if (p_trgt > 0.0) {
      out.p_b_kw = pb_hi;
      out.p_curt_kw = r_kw;
    } else {
      out.p_b_kw = pb_lo;
      out.p_curt_kw = 0.0;
    }
  }
  out.p_inv_kw = out.p_b_kw - r_kw + out.p_curt_kw;

  const double head = std::sqrt(std::max(
      0.0, inv.s_max_kva * inv.s_max_kva - out.p_inv_kw * out.p_inv_kw));
  const double cap = std::min(
      head, q_capability(std::clamp(out.p_inv_kw, -inv.s_max_kva,
                                    inv.s_max_kva),
                         inv));
  out.q_inv_kvar = std::clamp(q_trgt, -cap, cap);
  return out;
}

}  // namespace prosim
