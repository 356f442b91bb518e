#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "prosim/prosumer.hpp"

namespace prosim {

// One synthetic residential day on the outer grid: a two-peak price shape,
// morning/evening load peaks with a midday valley, and a midday PV bell.
// Flexibility envelopes follow the classic "0 to twice the flexible share"
// pattern on the inelastic load. Everything is a deterministic function of
// the seed.
struct SyntheticDay {
  ScenarioSeries series;
  std::vector<double> y_min_kw;
  std::vector<double> y_max_kw;
};

struct SyntheticProfile {
  double pv_kwp = 2.5;
  double load_base_kw = 0.25;
  double load_morning_peak_kw = 1.2;
  double load_evening_peak_kw = 2.0;
  double price_base = 12.0;   // currency cents per kWh
  double price_peak = 38.0;
  double kappa = 0.5;         // p_s = kappa * p_b
  double flex_share = 0.05;
  double noise = 0.05;        // relative jitter
};

namespace detail {

inline double bump(double t_hours, double center, double width) {
  const double z = (t_hours - center) / width;
  return std::exp(-0.5 * z * z);
}

}  // namespace detail

inline SyntheticDay generate_residential_day(const TimeGrid& grid,
                                             std::uint64_t seed,
                                             const SyntheticProfile& prof = {}) {
  grid.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-prof.noise, prof.noise);

  const std::size_t n = grid.steps;
  const double h = grid.step_hours;
  SyntheticDay day;
  day.series.load_kw.resize(n);
  day.series.gen_kw.resize(n);
  day.series.prices.buy.resize(n);
  day.series.prices.sell.resize(n);
  day.y_min_kw.assign(n, 0.0);
  day.y_max_kw.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * h;  // hour of day

    double load = prof.load_base_kw +
                  prof.load_morning_peak_kw * detail::bump(t, 7.5, 1.4) +
                  prof.load_evening_peak_kw * detail::bump(t, 19.5, 2.0);
    load *= 1.0 + jitter(rng);

    // PV bell between roughly 6h and 18h.
    double pv = 0.0;
    if (t > 6.0 && t < 18.0) {
      const double s = std::sin(std::numbers::pi * (t - 6.0) / 12.0);
      pv = prof.pv_kwp * s * s * (1.0 + 0.5 * jitter(rng));
    }

    double price = prof.price_base +
                   (prof.price_peak - prof.price_base) *
                       std::max(detail::bump(t, 8.0, 1.6),
                                detail::bump(t, 19.0, 2.2));
    price *= 1.0 + 0.5 * jitter(rng);

    day.series.load_kw[i] = std::max(0.0, load);
    day.series.gen_kw[i] = std::max(0.0, pv);
    day.series.prices.buy[i] = std::max(0.5, price);
    day.series.prices.sell[i] = prof.kappa * day.series.prices.buy[i];
    day.y_max_kw[i] = 2.0 * prof.flex_share * day.series.load_kw[i];
  }
  return day;
}

// Cumulative flexible-energy target for envelopes generated above: the
// midpoint of what the envelopes admit.
inline double flex_target_kwh(const SyntheticDay& day, const TimeGrid& grid) {
  double sum = 0.0;
  for (std::size_t i = 0; i < day.y_max_kw.size(); ++i)
    sum += 0.5 * (day.y_min_kw[i] + day.y_max_kw[i]);
  return sum * grid.step_hours;
}

}  // namespace prosim
