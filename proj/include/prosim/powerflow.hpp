#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace prosim {

struct FeederBranch {
  int from = 0;
  int to = 0;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
};

// Radial low-voltage feeder, node 1 is the slack bus. Branches may be listed
// in any order/orientation; they must form a tree rooted at node 1.
struct FeederModel {
  int node_count = 0;
  std::vector<FeederBranch> branches;
  double v_base_v = 400.0;
  double s_base_kva = 10.0;
  double slack_voltage = 1.0;

  double z_base_ohm() const { return v_base_v * v_base_v / (s_base_kva * 1e3); }

  void validate() const {
    if (node_count < 1) throw std::invalid_argument("feeder: no nodes");
    if (branches.size() + 1 != static_cast<std::size_t>(node_count))
      throw std::invalid_argument("feeder: branch count must be nodes-1");
    if (!(v_base_v > 0.0 && s_base_kva > 0.0 && slack_voltage > 0.0))
      throw std::invalid_argument("feeder: bases must be positive");
    for (const auto& br : branches) {
      if (br.from < 1 || br.from > node_count || br.to < 1 ||
          br.to > node_count || br.from == br.to)
        throw std::invalid_argument("feeder: branch endpoints out of range");
      if (!(br.r_ohm > 0.0) || !(br.x_ohm > 0.0))
        throw std::invalid_argument("feeder: R and X must be positive");
    }
  }
};

// Net nodal power, consumption-positive P (kW) and consumption-positive
// Q (kVAr); index 0 is the slack node and is ignored.
struct NodalInjection {
  std::vector<double> p_kw;
  std::vector<double> q_kvar;
};

struct VoltageSolution {
  std::vector<double> v_mag_pu;
  std::vector<double> v_angle_rad;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Rooted view of the feeder: parent pointers and a breadth-first ordering
// that is independent of how the branch list was supplied.
struct FeederTree {
  std::vector<int> parent;                  // parent[node], 0-based, -1 root
  std::vector<std::complex<double>> z_pu;   // impedance to parent
  std::vector<int> order;                   // BFS order, root first
};

inline FeederTree build_tree(const FeederModel& f) {
  f.validate();
  const int n = f.node_count;
  std::vector<std::vector<std::pair<int, std::complex<double>>>> adj(n);
  const double zb = f.z_base_ohm();
  for (const auto& br : f.branches) {
    const std::complex<double> z(br.r_ohm / zb, br.x_ohm / zb);
    adj[br.from - 1].push_back({br.to - 1, z});
    adj[br.to - 1].push_back({br.from - 1, z});
  }
  for (auto& nbrs : adj)
    std::sort(nbrs.begin(), nbrs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

  FeederTree t;
  t.parent.assign(n, -1);
  t.z_pu.assign(n, {0.0, 0.0});
  t.order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<int> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    t.order.push_back(u);
    for (const auto& [v, z] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      t.parent[v] = u;
      t.z_pu[v] = z;
      queue.push_back(v);
    }
  }
  if (t.order.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("feeder: branches do not form a connected tree");
  return t;
}

}  // namespace detail

// Backward/forward sweep power flow. Backward pass accumulates branch
// currents from the leaves, forward pass propagates voltage drops from the
// slack. Stops when the voltage step falls below 1e-10 or the KCL power
// mismatch below 1e-8 p.u.; 100 iterations without either is a divergence.
inline VoltageSolution backward_forward_sweep(const FeederModel& feeder,
                                              const NodalInjection& inj) {
  const auto tree = detail::build_tree(feeder);
  const int n = feeder.node_count;
  if (inj.p_kw.size() != static_cast<std::size_t>(n) ||
      inj.q_kvar.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("powerflow: injection length mismatch");

  std::vector<std::complex<double>> s_pu(n);
  for (int j = 0; j < n; ++j)
    s_pu[j] = {inj.p_kw[j] / feeder.s_base_kva,
               inj.q_kvar[j] / feeder.s_base_kva};

  const std::complex<double> v_slack(feeder.slack_voltage, 0.0);
  std::vector<std::complex<double>> v(n, v_slack);
  std::vector<std::complex<double>> i_node(n), i_branch(n);

  VoltageSolution sol;
  sol.v_mag_pu.assign(n, feeder.slack_voltage);
  sol.v_angle_rad.assign(n, 0.0);

  for (int iter = 1; iter <= 100; ++iter) {
    for (int j = 1; j < n; ++j) i_node[j] = std::conj(s_pu[j] / v[j]);

    // Backward: branch current toward each node = its own draw plus all
    // downstream branch currents.
    std::fill(i_branch.begin(), i_branch.end(), std::complex<double>());
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
      const int u = *it;
      if (u == 0) continue;
      i_branch[u] += i_node[u];
      if (tree.parent[u] != 0) i_branch[tree.parent[u]] += i_branch[u];
    }

    // Forward: voltage drop along each branch.
    double dv = 0.0;
    for (const int u : tree.order) {
      if (u == 0) continue;
      const std::complex<double> vu = v[tree.parent[u]] - tree.z_pu[u] * i_branch[u];
      dv = std::max(dv, std::abs(vu - v[u]));
      v[u] = vu;
    }

    // KCL power mismatch with the updated voltages and branch currents.
    double mismatch = 0.0;
    for (int j = 1; j < n; ++j) {
      std::complex<double> net = i_branch[j];
      for (int k = 1; k < n; ++k)
        if (tree.parent[k] == j) net -= i_branch[k];
      mismatch = std::max(mismatch, std::abs(v[j] * std::conj(net) - s_pu[j]));
    }

    sol.iterations = iter;
    bool bad = false;
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag()))
        bad = true;
    if (bad) break;
    if (mismatch < 1e-8 || dv < 1e-10) {
      sol.converged = mismatch < 1e-8;
      break;
    }
  }

  for (int j = 0; j < n; ++j) {
    sol.v_mag_pu[j] = std::abs(v[j]);
    sol.v_angle_rad[j] = std::arg(v[j]);
  }
  return sol;
}

}  // namespace prosim
