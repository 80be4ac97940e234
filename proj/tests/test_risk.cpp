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

#include "drcover/risk.hpp"

#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"

using namespace drcover;
using Catch::Approx;

TEST_CASE("fbar on both branches") {
  REQUIRE(fbar(-3, 2.0) == Approx(-3.0));
  REQUIRE(fbar(0, 2.0) == 0.0);
  REQUIRE(fbar(0, 7.0) == 0.0);
  REQUIRE(fbar(1, 3.0) == Approx(1.0));
  REQUIRE(fbar(4, 2.0) == Approx(2.0));
}

TEST_CASE("fbar is concave increasing over integers") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    double prev_inc = std::numeric_limits<double>::infinity();
    for (long long z = -5; z <= 10; ++z) {
      const double inc = fbar(z + 1, p) - fbar(z, p);
      REQUIRE(inc > 0.0);
      REQUIRE(inc <= prev_inc + 1e-12);
      prev_inc = inc;
    }
  }
}

TEST_CASE("g_value basic cases") {
  Instance inst;
  inst.n_elements = 5;
  inst.n_targets = 2;
  inst.n_scenarios = 1;
  inst.p = 2.0;
  inst.delta = 0.1;
  inst.epsilon = 0.1;
  inst.cost.assign(5, 1.0);
  inst.coverage = {1, 1};
  inst.samples.assign(10, 1);  // every element covers every target
  std::vector<int> x = {1, 1, 1, 1, 0};  // dot = 4, margin = 4
  REQUIRE(g_value(x, inst, 0) == Approx(2.0));
  std::vector<int> none(5, 0);
  REQUIRE(g_value(none, inst, 0) == 0.0);
}

TEST_CASE("g_value equals an independent re-evaluation on random inputs") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    auto inst = testing::make_random_instance(rng, 6, 3, 4, 1.0 + t % 3, 0.1, 0.2);
    auto x = testing::random_binary(rng, 6);
    for (int j = 0; j < inst.n_scenarios; ++j) {
      // Direct form: min_i ((x.xi_i - v_i + 1)^+)^{1/p}.
      double direct = std::numeric_limits<double>::infinity();
      for (int i = 0; i < inst.n_targets; ++i) {
        long long dot = 0;
        for (int k = 0; k < inst.n_elements; ++k) dot += x[k] * inst.sample(j, i, k);
        const double m = std::max<double>(0.0, double(dot) - inst.coverage[i] + 1);
        direct = std::min(direct, std::pow(m, 1.0 / inst.p));
      }
      REQUIRE(g_value(x, inst, j) == Approx(direct).margin(1e-12));
    }
  }
}

TEST_CASE("ordering of clamp and min does not matter (domain extension identity)") {
  for (double p : {1.5, 2.0, 3.0}) {
    const int n = 6;
    for (int I = 1; I <= 3; ++I) {
      std::vector<long long> m(I, -n);
      for (;;) {
        long long mn = m[0];
        double lhs = std::numeric_limits<double>::infinity();
        for (int i = 0; i < I; ++i) {
          mn = std::min(mn, m[i]);
          lhs = std::min(lhs, std::pow(double(std::max<long long>(m[i], 0)), 1.0 / p));
        }
        const double rhs = std::max(0.0, fbar(mn, p));
        REQUIRE(lhs == Approx(rhs).margin(1e-12));
        int i = 0;
        while (i < I && ++m[i] > n) m[i++] = -n;
        if (i == I) break;
      }
    }
  }
}

TEST_CASE("g is nondecreasing when any component of x flips to one") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 100; ++t) {
    auto inst = testing::make_random_instance(rng, 7, 3, 3, 2.0, 0.1, 0.2);
    auto x = testing::random_binary(rng, 7);
    for (int j = 0; j < inst.n_scenarios; ++j) {
      const double base = g_value(x, inst, j);
      REQUIRE(base >= 0.0);
      REQUIRE(base <= std::pow(7.0, 0.5) + 1e-12);
      for (int k = 0; k < 7; ++k) {
        if (x[k] == 1) continue;
        auto y = x;
        y[k] = 1;
        REQUIRE(g_value(y, inst, j) >= base - 1e-12);
      }
    }
  }
}

TEST_CASE("var_cvar on constant and mixed samples") {
  auto c = var_cvar({-1, -1, -1, -1}, 0.25);
  REQUIRE(c.var == Approx(-1.0));
  REQUIRE(c.cvar == Approx(-1.0));

  auto m = var_cvar({-2, -2, -2, 0}, 0.25);
  REQUIRE(m.var == Approx(-2.0));
  REQUIRE(m.cvar == Approx(0.0));

  REQUIRE_THROWS_AS(var_cvar({}, 0.5), std::invalid_argument);
}

TEST_CASE("cvar equals the candidate-grid minimization") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.95);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + int(rng() % 12);
    std::vector<double> v(n);
    for (auto& e : v) e = val(rng);
    const double eps = eps_dist(rng);
    const auto vc = var_cvar(v, eps);
    // The minimizer of gamma + (1/(N eps)) sum (v - gamma)^+ lies at a sample.
    double best = std::numeric_limits<double>::infinity();
    for (double gamma : v) {
      double s = 0;
      for (double e : v) s += std::max(0.0, e - gamma);
      best = std::min(best, gamma + s / (n * eps));
    }
    REQUIRE(vc.cvar == Approx(best).margin(1e-9));
    REQUIRE(vc.cvar >= vc.var - 1e-12);
  }
}

TEST_CASE("membership on constant-score instances") {
  // g_j = G for all j  =>  CVaR(-g) = -G, member iff delta/eps <= G.
  Instance inst;
  inst.n_elements = 4;
  inst.n_targets = 1;
  inst.n_scenarios = 3;
  inst.p = 2.0;
  inst.coverage = {1};
  inst.cost.assign(4, 1.0);
  inst.samples.assign(12, 1);
  std::vector<int> x = {1, 1, 1, 1};  // margin 4, G = 2
  inst.epsilon = 0.5;
  inst.delta = 0.9;  // delta/eps = 1.8 <= 2
  REQUIRE(z_membership(x, inst));
  inst.delta = 1.1;  // delta/eps = 2.2 > 2
  REQUIRE_FALSE(z_membership(x, inst));

  std::vector<int> zero(4, 0);  // g = 0 everywhere, delta > 0
  REQUIRE_FALSE(z_membership(zero, inst));
}

TEST_CASE("existential and cvar membership agree on random pairs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d_dist(0.01, 2.0);
  std::uniform_real_distribution<double> e_dist(0.05, 0.6);
  for (int t = 0; t < 1000; ++t) {
    auto inst = testing::make_random_instance(rng, 6, 2, 5, 1.0 + t % 3,
                                              d_dist(rng), e_dist(rng));
    auto x = testing::random_binary(rng, 6, 0.3 + 0.1 * (t % 6));
    REQUIRE(z_membership(x, inst) == z_membership_existential(x, inst));
  }
}

TEST_CASE("membership certificate satisfies the existential system") {
  std::mt19937_64 rng(78);
  for (int t = 0; t < 200; ++t) {
    auto inst = testing::make_random_instance(rng, 6, 2, 5, 2.0, 0.2, 0.3);
    auto x = testing::random_binary(rng, 6, 0.7);
    auto cert = membership_certificate(x, inst);
    REQUIRE(cert.has_value() == z_membership(x, inst));
    if (cert) {
      REQUIRE(cert->gamma >= 0.0);
      double sum = 0;
      auto sm = scenario_margins(x, inst);
      for (int j = 0; j < inst.n_scenarios; ++j) {
        REQUIRE(cert->z[j] <= 1e-12);
        REQUIRE(cert->z[j] + cert->gamma <= sm.g[j] + 1e-9);
        sum += cert->z[j];
      }
      REQUIRE(inst.delta - cert->gamma * inst.epsilon <=
              sum / inst.n_scenarios + 1e-7);
    }
  }
}

TEST_CASE("true_reliability closed form") {
  std::vector<int> x = {1, 1, 1, 0};
  std::vector<double> q = {0.5};
  std::vector<int> v = {1};
  REQUIRE(true_reliability(x, q, v) == Approx(0.875));  // 1 - 0.5^3

  std::vector<int> v_high = {4};
  REQUIRE(true_reliability(x, q, v_high) == 0.0);  // sum x < v
}

TEST_CASE("true_reliability matches Monte-Carlo within 3 standard errors") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> q_dist(0.2, 0.9);
  for (int t = 0; t < 3; ++t) {
    const int n = 12, I = 2;
    auto x = testing::random_binary(rng, n, 0.6);
    std::vector<double> q(I);
    for (auto& e : q) e = q_dist(rng);
    std::vector<int> v(I, 1 + int(rng() % 2));
    const double exact = true_reliability(x, q, v);

    const int draws = 1000000;
    std::bernoulli_distribution coin;
    int hits = 0;
    long long m = 0;
    for (int k = 0; k < n; ++k) m += x[k];
    for (int d = 0; d < draws; ++d) {
      bool all = true;
      for (int i = 0; i < I && all; ++i) {
        std::binomial_distribution<int> bin(int(m), q[i]);
        if (bin(rng) < v[i]) all = false;
      }
      if (all) ++hits;
    }
    const double est = double(hits) / draws;
    const double se = std::sqrt(std::max(est * (1 - est), 1e-12) / draws);
    REQUIRE(std::fabs(est - exact) <= 3 * se + 1e-9);
  }
}

TEST_CASE("empirical_reliability counts covered scenarios") {
  std::mt19937_64 rng(101);
  auto inst = testing::make_random_instance(rng, 5, 2, 8, 2.0, 0.1, 0.2);
  std::vector<int> ones(5, 1), zeros(5, 0);

  auto all_ones = inst;
  std::fill(all_ones.samples.begin(), all_ones.samples.end(), 1);
  REQUIRE(empirical_reliability(ones, all_ones) == 1.0);
  REQUIRE(empirical_reliability(zeros, inst) == 0.0);

  auto x = testing::random_binary(rng, 5, 0.6);
  int count = 0;
  for (int j = 0; j < inst.n_scenarios; ++j) {
    bool ok = true;
    for (int i = 0; i < inst.n_targets && ok; ++i) {
      long long dot = 0;
      for (int k = 0; k < 5; ++k) dot += x[k] * inst.sample(j, i, k);
      if (dot < inst.coverage[i]) ok = false;
    }
    if (ok) ++count;
  }
  REQUIRE(empirical_reliability(x, inst) ==
          Approx(double(count) / inst.n_scenarios));
}
