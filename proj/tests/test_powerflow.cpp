#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "prosim/powerflow.hpp"
#include "support/oracles.hpp"

using namespace prosim;

namespace {

FeederModel table_feeder(double v_base = 400.0) {
  FeederModel f;
  f.node_count = 4;
  f.branches = {{1, 2, 0.0922, 0.0470},
                {2, 3, 0.1844, 0.0940},
                {3, 4, 0.3660, 0.1864}};
  f.v_base_v = v_base;
  f.s_base_kva = 10.0;
  return f;
}

NodalInjection zeros(int n) {
  NodalInjection inj;
  inj.p_kw.assign(n, 0.0);
  inj.q_kvar.assign(n, 0.0);
  return inj;
}

}  // namespace

TEST_CASE("zero injections keep every node at the slack voltage") {
  FeederModel f = table_feeder();
  f.slack_voltage = 1.02;
  const auto sol = backward_forward_sweep(f, zeros(4));
  REQUIRE(sol.converged);
  for (double v : sol.v_mag_pu) CHECK(v == Catch::Approx(1.02).margin(1e-12));
}

TEST_CASE("two-bus case matches the closed-form root") {
  FeederModel f;
  f.node_count = 2;
  f.branches = {{1, 2, 0.1, 0.05}};
  f.v_base_v = 400.0;
  f.s_base_kva = 10.0;
  NodalInjection inj = zeros(2);
  inj.p_kw[1] = 1.0;
  const auto sol = backward_forward_sweep(f, inj);
  REQUIRE(sol.converged);
  const double zb = f.z_base_ohm();
  const double expected =
      oracles::two_bus_vmag(1.0, 0.1 / zb, 0.05 / zb, 0.1, 0.0);
  CHECK(sol.v_mag_pu[1] == Catch::Approx(expected).margin(1e-6));

  // with reactive load too
  inj.q_kvar[1] = 0.7;
  const auto sol2 = backward_forward_sweep(f, inj);
  const double expected2 =
      oracles::two_bus_vmag(1.0, 0.1 / zb, 0.05 / zb, 0.1, 0.07);
  CHECK(sol2.v_mag_pu[1] == Catch::Approx(expected2).margin(1e-6));
}

TEST_CASE("generation at the terminal node raises its voltage") {
  const FeederModel f = table_feeder(230.0);
  NodalInjection inj = zeros(4);
  inj.p_kw[3] = -2.5;
  const auto sol = backward_forward_sweep(f, inj);
  REQUIRE(sol.converged);
  CHECK(sol.v_mag_pu[3] > 1.0);
  CHECK(sol.v_mag_pu[3] > sol.v_mag_pu[2]);
}

TEST_CASE("uniform load gives a monotone radial profile") {
  const FeederModel f = table_feeder(230.0);
  NodalInjection inj = zeros(4);
  for (int j = 1; j < 4; ++j) inj.p_kw[j] = 2.0;
  const auto sol = backward_forward_sweep(f, inj);
  REQUIRE(sol.converged);
  for (int j = 1; j < 4; ++j) CHECK(sol.v_mag_pu[j] < sol.v_mag_pu[j - 1]);
}

TEST_CASE("branch list order does not change the solution") {
  NodalInjection inj = zeros(4);
  inj.p_kw = {0.0, 1.5, -2.0, 3.0};
  inj.q_kvar = {0.0, 0.3, -0.4, 0.2};
  FeederModel f = table_feeder(230.0);
  const auto a = backward_forward_sweep(f, inj);
  std::reverse(f.branches.begin(), f.branches.end());
  std::swap(f.branches[0].from, f.branches[0].to);  // flip orientation too
  const auto b = backward_forward_sweep(f, inj);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  for (int j = 0; j < 4; ++j) {
    CHECK(a.v_mag_pu[j] == b.v_mag_pu[j]);
    CHECK(a.v_angle_rad[j] == b.v_angle_rad[j]);
  }
}

TEST_CASE("random cases agree with an independent Gauss-Seidel solver") {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> pw(-3.0, 3.0), qw(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const FeederModel f = table_feeder(230.0);
    NodalInjection inj = zeros(4);
    for (int j = 1; j < 4; ++j) {
      inj.p_kw[j] = pw(rng);
      inj.q_kvar[j] = qw(rng);
    }
    const auto sweep = backward_forward_sweep(f, inj);
    REQUIRE(sweep.converged);
    const auto gs = oracles::gauss_seidel_vmag(f, inj);
    for (int j = 0; j < 4; ++j)
      CHECK(sweep.v_mag_pu[j] == Catch::Approx(gs[j]).margin(1e-6));
  }
}

TEST_CASE("a collapse-level load reports divergence instead of lying") {
  const FeederModel f = table_feeder(230.0);
  NodalInjection inj = zeros(4);
  inj.p_kw[3] = 500.0;  // far past the feeder's transfer capability
  const auto sol = backward_forward_sweep(f, inj);
  CHECK_FALSE(sol.converged);
}

TEST_CASE("malformed feeders are rejected") {
  FeederModel f = table_feeder();
  f.branches[2].to = 2;  // creates a parallel edge, leaves node 4 stranded
  CHECK_THROWS_AS(backward_forward_sweep(f, zeros(4)), std::invalid_argument);

  FeederModel g = table_feeder();
  g.branches.pop_back();
  CHECK_THROWS_AS(backward_forward_sweep(g, zeros(4)), std::invalid_argument);

  FeederModel h = table_feeder();
  h.branches[0].r_ohm = 0.0;
  CHECK_THROWS_AS(backward_forward_sweep(h, zeros(4)), std::invalid_argument);
}
