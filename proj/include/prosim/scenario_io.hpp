#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "prosim/simulation.hpp"
#include "prosim/synthetic.hpp"

namespace prosim {

using json = nlohmann::json;

inline std::string policy_name(Policy p) {
  switch (p) {
    case Policy::None: return "none";
    case Policy::PRC: return "prc";
    case Policy::ANRC: return "anrc";
    case Policy::Hybrid: return "hybrid";
  }
  return "none";
}

inline Policy policy_from_name(const std::string& s) {
  if (s == "none") return Policy::None;
  if (s == "prc") return Policy::PRC;
  if (s == "anrc") return Policy::ANRC;
  if (s == "hybrid") return Policy::Hybrid;
  throw std::invalid_argument("unknown policy '" + s + "'");
}

// ---------------------------------------------------------------------------
// Series files: delimited text, header `step,p_b,p_s,d,r,y_min,y_max`, one
// row per outer step.

struct SeriesData {
  ScenarioSeries series;
  std::vector<double> y_min_kw;
  std::vector<double> y_max_kw;
};

inline constexpr const char* kSeriesHeader = "step,p_b,p_s,d,r,y_min,y_max";

inline SeriesData parse_series_csv(std::istream& is, std::size_t expected_rows,
                                   const std::string& what) {
  SeriesData out;
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument(what + ": empty series file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSeriesHeader)
    throw std::invalid_argument(what + ": bad header, expected '" +
                                std::string(kSeriesHeader) + "'");
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::array<double, 7> vals{};
    for (int c = 0; c < 7; ++c) {
      if (!std::getline(ls, cell, ','))
        throw std::invalid_argument(what + ": short row " +
                                    std::to_string(row + 1));
      try {
        vals[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument(what + ": bad number '" + cell +
                                    "' in row " + std::to_string(row + 1));
      }
    }
    if (std::getline(ls, cell, ','))
      throw std::invalid_argument(what + ": extra columns in row " +
                                  std::to_string(row + 1));
    if (static_cast<std::size_t>(vals[0]) != row + 1)
      throw std::invalid_argument(what + ": step column must run 1..N");
    out.series.prices.buy.push_back(vals[1]);
    out.series.prices.sell.push_back(vals[2]);
    out.series.load_kw.push_back(vals[3]);
    out.series.gen_kw.push_back(vals[4]);
    out.y_min_kw.push_back(vals[5]);
    out.y_max_kw.push_back(vals[6]);
    ++row;
  }
  if (expected_rows != 0 && row != expected_rows)
    throw std::invalid_argument(what + ": expected " +
                                std::to_string(expected_rows) + " rows, got " +
                                std::to_string(row));
  out.series.validate(row);
  for (std::size_t i = 0; i < row; ++i)
    if (out.y_min_kw[i] < 0.0 || out.y_min_kw[i] > out.y_max_kw[i])
      throw std::invalid_argument(what + ": need 0 <= y_min <= y_max");
  return out;
}

inline SeriesData load_series_csv(const std::filesystem::path& path,
                                  std::size_t expected_rows) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open series file " + path.string());
  return parse_series_csv(is, expected_rows, path.string());
}

inline void write_series_csv(std::ostream& os, const SeriesData& data) {
  os << kSeriesHeader << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < data.series.load_kw.size(); ++i)
    os << (i + 1) << ',' << data.series.prices.buy[i] << ','
       << data.series.prices.sell[i] << ',' << data.series.load_kw[i] << ','
       << data.series.gen_kw[i] << ',' << data.y_min_kw[i] << ','
       << data.y_max_kw[i] << "\n";
}

// ---------------------------------------------------------------------------
// Scenario files (JSON).

inline json battery_to_json(const BatterySpec& b) {
  return json{{"b_min_kwh", b.b_min_kwh},   {"b_max_kwh", b.b_max_kwh},
              {"b0_kwh", b.b0_kwh},         {"delta_min_kw", b.ramp_min_kw},
              {"delta_max_kw", b.ramp_max_kw}, {"eta_ch", b.eta_ch},
              {"eta_dis", b.eta_dis}};
}

inline BatterySpec battery_from_json(const json& j) {
  BatterySpec b;
  b.b_min_kwh = j.value("b_min_kwh", 0.0);
  b.b_max_kwh = j.at("b_max_kwh").get<double>();
  b.b0_kwh = j.at("b0_kwh").get<double>();
  b.eta_ch = j.value("eta_ch", 1.0);
  b.eta_dis = j.value("eta_dis", 1.0);
  if (j.contains("c_rate")) {
    // "xC-yC": full charge in 1/x hours, full discharge in 1/y hours.
    const std::string s = j.at("c_rate").get<std::string>();
    const auto dash = s.find("C-");
    if (dash == std::string::npos || s.back() != 'C')
      throw std::invalid_argument("battery: c_rate must look like '0.5C-0.5C'");
    const double c_ch = std::stod(s.substr(0, dash));
    const double c_dis = std::stod(s.substr(dash + 2, s.size() - dash - 3));
    const double cap = b.b_max_kwh - b.b_min_kwh;
    b.ramp_max_kw = c_ch * cap;
    b.ramp_min_kw = -c_dis * cap;
  } else {
    b.ramp_min_kw = j.at("delta_min_kw").get<double>();
    b.ramp_max_kw = j.at("delta_max_kw").get<double>();
  }
  b.validate();
  return b;
}

// Scenario on disk: everything run_day needs, with per-node series kept in
// companion CSV files (paths resolved against the scenario file).
inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw std::invalid_argument("cannot open scenario file " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scenario JSON parse error: " +
                                std::string(e.what()));
  }

  Scenario scn;
  const json& tg = j.at("timegrid");
  scn.grid.steps = tg.value("N", 96);
  scn.grid.step_hours = tg.value("h", 0.25);
  scn.grid.inner_per_outer = tg.value("inner_per_outer", 15);

  const json& fd = j.at("feeder");
  scn.feeder.node_count = static_cast<int>(fd.at("nodes").size());
  for (std::size_t i = 0; i < fd.at("nodes").size(); ++i)
    if (fd.at("nodes")[i].get<int>() != static_cast<int>(i) + 1)
      throw std::invalid_argument("scenario: nodes must be listed 1..n");
  for (const auto& bj : fd.at("branches"))
    scn.feeder.branches.push_back({bj.at("from").get<int>(),
                                   bj.at("to").get<int>(),
                                   bj.at("r_ohm").get<double>(),
                                   bj.at("x_ohm").get<double>()});
  scn.feeder.v_base_v = fd.value("v_base_v", 400.0);
  scn.feeder.s_base_kva = fd.value("s_base_kva", 10.0);
  scn.feeder.slack_voltage = fd.value("slack_voltage", 1.0);
  const json& rj = fd.at("rules");
  scn.rules.u_min = rj.at("u_min").get<double>();
  scn.rules.u_max = rj.at("u_max").get<double>();
  scn.rules.delta_perm = rj.at("delta_perm").get<double>();

  for (const auto& [key, pj] : j.at("prosumers").items()) {
    const int node = std::stoi(key);
    ProsumerConfig pc;
    const auto series_path =
        path.parent_path() / pj.at("series").get<std::string>();
    SeriesData data = load_series_csv(series_path, scn.grid.steps);
    pc.series = std::move(data.series);
    pc.battery = battery_from_json(pj.at("battery"));
    pc.flex.y_min_kw = std::move(data.y_min_kw);
    pc.flex.y_max_kw = std::move(data.y_max_kw);
    const json& fj = pj.at("flexibility");
    if (fj.at("K").is_string() && fj.at("K").get<std::string>() == "auto") {
      double sum = 0.0;
      for (std::size_t i = 0; i < pc.flex.y_min_kw.size(); ++i)
        sum += 0.5 * (pc.flex.y_min_kw[i] + pc.flex.y_max_kw[i]);
      pc.flex.target_kwh = sum * scn.grid.step_hours;
    } else {
      pc.flex.target_kwh = fj.at("K").get<double>();
    }
    pc.flex.epsilon_kwh =
        fj.contains("epsilon")
            ? fj.at("epsilon").get<double>()
            : FlexibilitySpec::default_epsilon(pc.flex.target_kwh);
    const json& ij = pj.at("inverter");
    pc.inverter.s_max_kva = ij.at("s_max_kva").get<double>();
    pc.inverter.p_max_kw = ij.value("p_max_kw", pc.inverter.s_max_kva);
    pc.inverter.pf_wc = ij.value("pf_wc", 0.9);
    scn.prosumers.emplace(node, std::move(pc));
  }

  scn.policy = policy_from_name(j.value("policy", "none"));
  scn.active_node = j.at("active_node").get<int>();
  scn.seed = j.value("seed", 0ULL);
  scn.validate();
  return scn;
}

inline json scenario_to_json(const Scenario& scn,
                             const std::map<int, std::string>& series_paths) {
  json j;
  j["timegrid"] = {{"N", scn.grid.steps},
                   {"h", scn.grid.step_hours},
                   {"inner_per_outer", scn.grid.inner_per_outer}};
  json nodes = json::array();
  for (int i = 1; i <= scn.feeder.node_count; ++i) nodes.push_back(i);
  json branches = json::array();
  for (const auto& br : scn.feeder.branches)
    branches.push_back({{"from", br.from},
                        {"to", br.to},
                        {"r_ohm", br.r_ohm},
                        {"x_ohm", br.x_ohm}});
  j["feeder"] = {{"nodes", nodes},
                 {"branches", branches},
                 {"v_base_v", scn.feeder.v_base_v},
                 {"s_base_kva", scn.feeder.s_base_kva},
                 {"slack_voltage", scn.feeder.slack_voltage},
                 {"rules",
                  {{"u_min", scn.rules.u_min},
                   {"u_max", scn.rules.u_max},
                   {"delta_perm", scn.rules.delta_perm}}}};
  json pros;
  for (const auto& [node, pc] : scn.prosumers) {
    json pj;
    pj["series"] = series_paths.count(node) ? series_paths.at(node)
                                            : "node" + std::to_string(node) +
                                                  ".csv";
    pj["battery"] = battery_to_json(pc.battery);
    pj["flexibility"] = {{"K", pc.flex.target_kwh},
                         {"epsilon", pc.flex.epsilon_kwh}};
    pj["inverter"] = {{"s_max_kva", pc.inverter.s_max_kva},
                      {"p_max_kw", pc.inverter.p_max_kw},
                      {"pf_wc", pc.inverter.pf_wc}};
    pros[std::to_string(node)] = pj;
  }
  j["prosumers"] = pros;
  j["policy"] = policy_name(scn.policy);
  j["active_node"] = scn.active_node;
  j["seed"] = scn.seed;
  return j;
}

// ---------------------------------------------------------------------------
// Reports.

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline constexpr const char* kTraceHeader = "minute,U,p_inv,q_inv,p_curt,p_b,b";

inline void write_trace_csv(std::ostream& os, const NodeTraces& tr) {
  os << kTraceHeader << "\n";
  os.precision(17);
  const bool full = !tr.p_inv_kw.empty();
  for (std::size_t k = 0; k < tr.u_pu.size(); ++k) {
    os << k << ',' << tr.u_pu[k] << ',' << (full ? tr.p_inv_kw[k] : 0.0) << ','
       << (full ? tr.q_inv_kvar[k] : 0.0) << ','
       << (full ? tr.p_curt_kw[k] : 0.0) << ',' << (full ? tr.p_b_kw[k] : 0.0)
       << ',' << (full ? tr.soc_kwh[k] : 0.0) << "\n";
  }
}

inline constexpr const char* kScheduleHeader = "step,p_b_price,p_s_price,d,r,y,x";

// Realized slow-timescale plan plus the billing inputs, so every metric can
// be recomputed from the emitted files alone.
inline void write_schedule_csv(std::ostream& os, const SimulationResult& res,
                               const ScenarioSeries& series) {
  os << kScheduleHeader << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < res.sched_x_kwh.size(); ++i)
    os << (i + 1) << ',' << series.prices.buy[i] << ',' << series.prices.sell[i]
       << ',' << series.load_kw[i] << ',' << series.gen_kw[i] << ','
       << res.sched_y_kw[i] << ',' << res.sched_x_kwh[i] << "\n";
}

inline json report_to_json(const Scenario& scn, const SimulationResult& res,
                           const std::map<int, std::string>& series_paths) {
  json j;
  const json scen_json = scenario_to_json(scn, series_paths);
  j["scenario"] = scen_json;
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(scen_json.dump())));
  j["scenario_hash"] = hash;
  j["policy"] = policy_name(res.policy);
  j["active_node"] = res.active_node;

  json metrics;
  for (const auto& [node, counts] : res.vci_per_node) {
    json nm;
    nm["vci"] = counts;
    nm["cvc"] = res.cvc_per_node.at(node);
    if (node == res.active_node) {
      nm["cost_wic"] = res.metrics.cost_wic;
      nm["cost_inv"] = res.metrics.cost_inv;
      if (res.policy != Policy::None) {
        nm["lcg_abs"] = res.metrics.lcg_abs;
        nm["lcg_pct"] = res.metrics.lcg_pct;
      }
      nm["tce_kwh"] = res.metrics.tce_kwh;
    }
    metrics[std::to_string(node)] = nm;
  }
  j["metrics"] = metrics;
  j["timing"] = {{"arbitrage_total_s", res.timings.arbitrage_total_s},
                 {"powerflow_total_s", res.timings.powerflow_total_s},
                 {"inner_loop_total_s", res.timings.inner_loop_total_s},
                 {"wall_s", res.timings.wall_s}};
  return j;
}

// Writes report.json plus per-node trace CSVs and the active node's schedule
// CSV into out_dir. Returns the report path.
inline std::filesystem::path write_report(
    const std::filesystem::path& out_dir, const Scenario& scn,
    const SimulationResult& res,
    const std::map<int, std::string>& series_paths,
    const std::string& stem = "report") {
  std::filesystem::create_directories(out_dir);
  for (const auto& [node, tr] : res.traces) {
    std::ofstream ts(out_dir /
                     (stem + "_trace_node" + std::to_string(node) + ".csv"));
    write_trace_csv(ts, tr);
  }
  {
    std::ofstream ss(out_dir / (stem + "_schedule_node" +
                                std::to_string(res.active_node) + ".csv"));
    write_schedule_csv(ss, res, scn.prosumers.at(res.active_node).series);
  }
  const auto report_path = out_dir / (stem + ".json");
  std::ofstream rs(report_path);
  rs << report_to_json(scn, res, series_paths).dump(2) << "\n";
  return report_path;
}

}  // namespace prosim
