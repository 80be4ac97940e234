// Copyright 2026 The drcover Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "drcover/scenario_cuts.hpp"

#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "drcover/lp.hpp"
#include "support/instances.hpp"

using namespace drcover;
using Catch::Approx;

namespace {

// Prop-4-style continuous knapsack solved by the LP module:
// max c_p.y + fbar(1-v_m)  s.t.  1.y <= x.xi_i - v_i + v_m for all i, y in [0,1]^n.
double knapsack_lp_oracle(std::span<const int> x, const Instance& inst, int j) {
  const int n = inst.n_elements;
  const int v_m = inst.max_coverage();
  const auto cp = cp_vector(v_m, inst.p, n);
  LinearProgram lp;
  lp.maximize = true;
  for (int k = 0; k < n; ++k) lp.add_column(cp[k], 0.0, 1.0);
  for (int i = 0; i < inst.n_targets; ++i) {
    long long dot = 0;
    auto row = inst.scenario_row(j, i);
    for (int k = 0; k < n; ++k) dot += x[k] * row[k];
    std::vector<std::pair<int, double>> coeffs;
    for (int k = 0; k < n; ++k) coeffs.emplace_back(k, 1.0);
    lp.add_row(std::move(coeffs), RowSense::kLe,
               double(dot - inst.coverage[i] + v_m));
  }
  auto out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::kOptimal);
  return out.objective + fbar(1 - v_m, inst.p);
}

// Dual objective of (DSP_j) maximized over the candidate kinks of 1^T mu1;
// returns the optimum of the minimization dual (the negation).
double dual_scan_oracle(std::span<const int> x, const Instance& inst, int j) {
  const int n = inst.n_elements;
  const int v_m = inst.max_coverage();
  const auto cp = cp_vector(v_m, inst.p, n);
  const auto cap = shifted_capacity(x, inst, j);
  std::vector<double> candidates = {0.0};
  for (double c : cp) candidates.push_back(-c);
  double best = -std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    double q = t * cap.v_bar - fbar(1 - v_m, inst.p);
    for (double c : cp) q -= std::max(c + t, 0.0);
    best = std::max(best, q);
  }
  return -best;
}

}  // namespace

TEST_CASE("cp_vector closed forms") {
  auto a = cp_vector(1, 2.0, 3);
  REQUIRE(a[0] == Approx(1.0));
  REQUIRE(a[1] == Approx(std::sqrt(2.0) - 1.0));
  REQUIRE(a[2] == Approx(std::sqrt(3.0) - std::sqrt(2.0)));

  auto b = cp_vector(2, 1.0, 3);
  REQUIRE(b == std::vector<double>{1.0, 1.0, 1.0});

  auto c = cp_vector(3, 2.0, 4);
  REQUIRE(c[0] == Approx(1.0));
  REQUIRE(c[1] == Approx(1.0));
  REQUIRE(c[2] == Approx(1.0));
  REQUIRE(c[3] == Approx(std::sqrt(2.0) - 1.0));
}

TEST_CASE("cp_vector entries positive and nonincreasing") {
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (int v_m = 1; v_m <= 5; ++v_m) {
      auto cp = cp_vector(v_m, p, 8);
      for (std::size_t k = 0; k < cp.size(); ++k) {
        REQUIRE(cp[k] > 0.0);
        if (k > 0) REQUIRE(cp[k] <= cp[k - 1] + 1e-12);
      }
    }
}

TEST_CASE("knapsack_value closed-form cases") {
  std::mt19937_64 rng(1);
  auto inst = testing::make_random_instance(rng, 6, 2, 1, 2.0, 0.1, 0.2, 1);
  std::fill(inst.samples.begin(), inst.samples.end(), 1);
  inst.coverage = {1, 1};
  std::vector<int> x = {1, 1, 1, 1, 0, 0};  // tightest margin 4
  REQUIRE(knapsack_value(x, inst, 0) == Approx(2.0));

  inst.coverage = {3, 3};
  std::vector<int> none(6, 0);  // margin 0 - 3 + 1 = -2
  REQUIRE(knapsack_value(none, inst, 0) == Approx(-2.0));
}

TEST_CASE("knapsack_value equals the LP optimum exhaustively") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 12; ++t) {
    const int n = 2 + t % 4;  // up to 5
    const int targets = 1 + t % 3;
    auto inst = testing::make_random_instance(rng, n, targets, 2,
                                              t % 2 ? 2.0 : 3.0, 0.1, 0.2, n);
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> x(n);
      for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1;
      for (int j = 0; j < inst.n_scenarios; ++j)
        REQUIRE(knapsack_value(x, inst, j) ==
                Approx(knapsack_lp_oracle(x, inst, j)).margin(1e-7));
    }
  }
}

TEST_CASE("closed-form dual attains strong duality on random pairs") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 2000; ++t) {
    const int n = 2 + int(rng() % 7);
    auto inst = testing::make_random_instance(rng, n, 1 + int(rng() % 3), 1,
                                              1.0 + (t % 5) * 0.5, 0.1, 0.2,
                                              std::min(n, 3));
    auto x = testing::random_binary(rng, n);
    const auto d = dual_solution(x, inst, 0);
    REQUIRE(d.objective == Approx(knapsack_value(x, inst, 0)).margin(1e-9));
    REQUIRE(d.objective == Approx(dual_scan_oracle(x, inst, 0)).margin(1e-9));
    REQUIRE(d.mu1_sum <= 0.0);
    for (double m : d.mu2) REQUIRE(m <= 1e-15);
    // Dual feasibility: mu1^T 1_{Ixn} + mu2 <= -c_p componentwise.
    const auto cp = cp_vector(inst.max_coverage(), inst.p, n);
    for (int k = 0; k < n; ++k)
      REQUIRE(d.mu1_sum + d.mu2[k] <= -cp[k] + 1e-12);
  }
}

TEST_CASE("dual handles clamped capacities at zero and at n") {
  std::mt19937_64 rng(53);
  // v_bar = 0: no selection, all-equal coverage levels.
  Instance inst;
  inst.n_elements = 4;
  inst.n_targets = 2;
  inst.n_scenarios = 1;
  inst.p = 2.0;
  inst.delta = 0.1;
  inst.epsilon = 0.2;
  inst.cost.assign(4, 1.0);
  inst.coverage = {2, 2};
  inst.samples.assign(8, 1);
  std::vector<int> zero(4, 0);
  auto d0 = dual_solution(zero, inst, 0);
  REQUIRE(shifted_capacity(zero, inst, 0).v_bar == 0);
  REQUIRE(d0.objective == Approx(dual_scan_oracle(zero, inst, 0)).margin(1e-9));
  REQUIRE(d0.objective == Approx(fbar(1 - 2, 2.0)).margin(1e-12));

  // v_bar = n: full selection with coverage 1 targets yields slack capacity.
  inst.coverage = {1, 1};
  std::vector<int> ones(4, 1);
  auto dn = dual_solution(ones, inst, 0);
  REQUIRE(shifted_capacity(ones, inst, 0).v_bar == 4);
  REQUIRE(dn.objective == Approx(dual_scan_oracle(ones, inst, 0)).margin(1e-9));
  REQUIRE(dn.mu1_sum == Approx(-cp_vector(1, 2.0, 4)[3]));
}

TEST_CASE("epi_separate on the zero function") {
  std::vector<double> x_hat = {0.3, 0.9, 0.1};
  auto epi = epi_separate([](const std::vector<int>&) { return 0.0; }, x_hat);
  REQUIRE(epi.constant == 0.0);
  for (double inc : epi.increments) REQUIRE(inc == 0.0);
  REQUIRE(epi.sigma == std::vector<int>{1, 0, 2});
}

TEST_CASE("epi_separate example and enumeration validity") {
  auto phi = [](const std::vector<int>& s) {
    double dot = 0;
    for (int e : s) dot += e;
    return std::min(-dot + 1.0, 0.0);
  };
  std::vector<double> x_hat = {0.9, 0.1};
  auto epi = epi_separate(phi, x_hat);
  REQUIRE(epi.constant == 0.0);
  REQUIRE(epi.sigma == std::vector<int>{0, 1});
  REQUIRE(epi.increments[0] == Approx(0.0));
  REQUIRE(epi.increments[1] == Approx(-1.0));
  for (int mask = 0; mask < 4; ++mask) {
    std::vector<int> x = {mask & 1, (mask >> 1) & 1};
    double affine = epi.constant;
    for (int k = 0; k < 2; ++k) affine += epi.increments[k] * x[epi.sigma[k]];
    REQUIRE(affine <= phi(x) + 1e-12);
  }
}

TEST_CASE("epi_separate valid under ties, random submodular family") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> alpha(0.0, 3.0);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + int(rng() % 3);  // up to 4
    std::vector<double> a(n);
    for (auto& e : a) e = alpha(rng);
    const double a0 = alpha(rng) - 1.5;
    auto phi = [&](const std::vector<int>& s) {
      double dot = 0;
      for (int k = 0; k < n; ++k) dot += a[k] * s[k];
      return std::min(-dot + a0, 0.0);
    };
    // Force ties in the point.
    std::vector<double> x_hat(n);
    for (auto& e : x_hat) e = (rng() % 3) * 0.5;
    auto epi = epi_separate(phi, x_hat);
    // Stable lowest-index-first ordering among ties.
    for (int k = 1; k < n; ++k) {
      REQUIRE(x_hat[epi.sigma[k - 1]] >= x_hat[epi.sigma[k]]);
      if (x_hat[epi.sigma[k - 1]] == x_hat[epi.sigma[k]])
        REQUIRE(epi.sigma[k - 1] < epi.sigma[k]);
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> x(n);
      for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1;
      double affine = epi.constant;
      for (int k = 0; k < n; ++k) affine += epi.increments[k] * x[epi.sigma[k]];
      REQUIRE(affine <= phi(x) + 1e-12);
    }
  }
}

TEST_CASE("benders_cut returns none at feasible points") {
  std::mt19937_64 rng(71);
  auto inst = testing::make_random_instance(rng, 6, 2, 3, 2.0, 0.1, 0.2, 1);
  std::vector<int> ones(6, 1);
  for (int j = 0; j < inst.n_scenarios; ++j) {
    const double g = g_value(ones, inst, j);
    std::vector<double> x_hat(6, 1.0);
    // Certificate on the boundary: z_j + gamma = g.
    REQUIRE_FALSE(benders_cut(x_hat, g, 0.0, inst, j).has_value());
    REQUIRE_FALSE(benders_cut(x_hat, 0.25 * g, -0.75 * g, inst, j).has_value());
  }
}

TEST_CASE("benders_cut at the origin under the structural certificate") {
  std::mt19937_64 rng(73);
  auto inst = testing::make_random_instance(rng, 6, 2, 3, 2.0, 0.1, 0.2, 2);
  std::vector<double> x_hat(6, 0.0);
  std::vector<int> xi(6, 0);
  // With gamma = z = 0 every scenario constraint z_j + gamma <= g_j holds
  // (g >= 0), so no cut exists at (0, 0, 0); the structural row is what the
  // point violates, and the master forces gamma = delta/eps instead.
  for (int j = 0; j < inst.n_scenarios; ++j)
    REQUIRE_FALSE(benders_cut(x_hat, 0.0, 0.0, inst, j).has_value());
  const double gamma_hat = inst.delta / inst.epsilon;
  for (int j = 0; j < inst.n_scenarios; ++j) {
    auto cut = benders_cut(x_hat, gamma_hat, 0.0, inst, j);
    REQUIRE(cut.has_value());
    // phi^j(empty) from the closed-form dual directly.
    const auto d = dual_solution(xi, inst, j);
    REQUIRE(cut->rhs == Approx(std::min(-d.objective, 0.0)).margin(1e-12));
    // Violated at the point: lhs = -gamma_hat < rhs.
    std::vector<double> z(inst.n_scenarios, 0.0);
    std::vector<double> bits;
    REQUIRE(cut->lhs_value(x_hat, gamma_hat, z, bits) < cut->rhs - 1e-9);
  }
}

TEST_CASE("benders increments: exactly one table case per position") {
  std::mt19937_64 rng(79);
  for (int t = 0; t < 200; ++t) {
    const int n = 3 + int(rng() % 6);  // up to 8
    auto inst = testing::make_random_instance(rng, n, 2, 2, 2.0, 0.5, 0.2, 2);
    auto x_int = testing::random_binary(rng, n, 0.4);
    std::vector<double> x_hat(x_int.begin(), x_int.end());
    auto cut = benders_cut(x_hat, 0.0, 0.0, inst, 0, 1e-9);
    if (!cut) continue;
    const auto dual = dual_solution(x_int, inst, 0);
    const double t_slope = dual.mu1_sum;
    auto row = inst.scenario_row(0, dual.i_star);
    const auto sigma = descending_order(x_hat);
    // Reconstruct phi along the chain and check the three-case table.
    double mu2_sum = 0;
    for (double m : dual.mu2) mu2_sum += m;
    const int v_m = inst.max_coverage();
    const double base = t_slope * (-inst.coverage[dual.i_star] + v_m) + mu2_sum -
                        fbar(1 - v_m, inst.p);
    double prev = std::min(base, 0.0);
    long long count = 0;
    for (int k = 0; k < n; ++k) {
      count += row[sigma[k]];
      const double cur = std::min(t_slope * count + base, 0.0);
      const double inc = -cut->x_coeffs[sigma[k]];
      const bool case1 = prev < 0.0;
      const bool case2 = prev == 0.0 && cur < 0.0;
      const bool case3 = cur == 0.0;
      REQUIRE((int(case1) + int(case2) + int(case3)) == 1);
      if (case1) REQUIRE(inc == Approx(t_slope * row[sigma[k]]).margin(1e-12));
      if (case2) REQUIRE(inc == Approx(cur).margin(1e-12));
      if (case3) REQUIRE(inc == Approx(0.0).margin(1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("benders cuts never eliminate feasible points (enumeration)") {
  std::mt19937_64 rng(83);
  for (int t = 0; t < 60; ++t) {
    const int n = 3 + int(rng() % 6);  // up to 8
    auto inst = testing::make_random_instance(rng, n, 1 + int(rng() % 3), 3,
                                              1.0 + (t % 3), 0.4, 0.25, 2);
    auto x_sep = testing::random_binary(rng, n, 0.3);
    std::vector<double> x_hat(x_sep.begin(), x_sep.end());
    for (int j = 0; j < inst.n_scenarios; ++j) {
      auto cut = benders_cut(x_hat, 0.0, 0.0, inst, j, 1e-9);
      if (!cut) continue;
      // Minorization of phi^j and validity against the true margin score:
      // for every binary x and every (gamma, z_j) with z_j + gamma <= g, the
      // tightest point has z_j + gamma = g, where the cut reads -g >= affine.
      for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> x(n);
        for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1;
        double affine = cut->rhs;
        for (int k = 0; k < n; ++k) affine += -cut->x_coeffs[k] * x[k];
        REQUIRE(affine <= -g_value(x, inst, j) + 1e-9);
      }
    }
  }
}
