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

#include "drcover/bnc.hpp"

#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"

using namespace drcover;
using Catch::Approx;

namespace {

double brute_force_min(const MilpModel& model) {
  const int n = model.lp.num_cols();
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1;
    bool ok = true;
    for (const auto& row : model.lp.rows) {
      double lhs = 0;
      for (auto [col, val] : row.coeffs) lhs += val * x[col];
      switch (row.sense) {
        case RowSense::kLe: ok = lhs <= row.rhs + 1e-9; break;
        case RowSense::kGe: ok = lhs >= row.rhs - 1e-9; break;
        case RowSense::kEq: ok = std::fabs(lhs - row.rhs) <= 1e-9; break;
      }
      if (!ok) break;
    }
    if (!ok) continue;
    double obj = 0;
    for (int k = 0; k < n; ++k) obj += model.lp.objective[k] * x[k];
    best = std::min(best, obj);
  }
  return best;
}

MilpModel random_binary_milp(std::mt19937_64& rng, int n, int m) {
  MilpModel model;
  std::uniform_int_distribution<int> coef(-4, 6);
  for (int k = 0; k < n; ++k) {
    model.lp.add_column(1 + int(rng() % 20), 0.0, 1.0);
    model.integer_cols.push_back(k);
  }
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < n; ++k) {
      int c = coef(rng);
      if (c != 0) row.emplace_back(k, double(c));
    }
    if (row.empty()) row.emplace_back(int(rng() % n), 1.0);
    model.lp.add_row(std::move(row), RowSense::kGe, 1 + int(rng() % 4));
  }
  return model;
}

}  // namespace

TEST_CASE("master variable layout per mode") {
  std::mt19937_64 rng(1);
  auto inst = testing::make_random_instance(rng, 6, 2, 4, 2.0, 0.2, 0.25);
  auto cont = build_master(inst, SolveMode::kTwoStage);
  REQUIRE(cont.milp.lp.num_cols() == 6 + 1 + 4);
  REQUIRE(cont.milp.integer_cols.size() == 6);
  REQUIRE(cont.milp.lp.num_rows() == 1);

  GammaGrid grid;
  grid.values = {1.0, std::sqrt(2.0), std::sqrt(3.0)};
  grid.powers = {1, 2, 3};
  auto cross = build_master(inst, SolveMode::kPlusCross, &grid);
  REQUIRE(cross.milp.lp.num_cols() == 6 + 3 + 4);
  REQUIRE(cross.milp.integer_cols.size() == 6 + 3);
  REQUIRE(cross.milp.lp.num_rows() == 2);  // structural + one-hot
  REQUIRE(cross.milp.lp.rows[1].sense == RowSense::kEq);
}

TEST_CASE("build_master rejects a missing or empty grid in the encoded mode") {
  std::mt19937_64 rng(2);
  auto inst = testing::make_random_instance(rng, 5, 2, 3, 2.0, 0.2, 0.25);
  REQUIRE_THROWS_AS(build_master(inst, SolveMode::kPlusCross, nullptr),
                    std::invalid_argument);
  GammaGrid empty;
  REQUIRE_THROWS_AS(build_master(inst, SolveMode::kPlusCross, &empty),
                    std::invalid_argument);
}

TEST_CASE("LP-integral model solves at the root") {
  MilpModel model;
  model.lp.add_column(1.0, 0.0, 1.0);
  model.lp.add_column(1.0, 0.0, 1.0);
  model.integer_cols = {0, 1};
  model.lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::kGe, 2.0);
  SolveConfig config;
  auto res = solve_milp(model, {}, config);
  REQUIRE(res.status == SolveStatus::kOptimal);
  REQUIRE(res.objective == Approx(2.0));
  REQUIRE(res.nodes == 1);
  REQUIRE(res.gap_percent == 0.0);
}

TEST_CASE("zero time limit reports TimeLimit with full gap") {
  MilpModel model;
  model.lp.add_column(1.0, 0.0, 1.0);
  model.integer_cols = {0};
  model.lp.add_row({{0, 1.0}}, RowSense::kGe, 1.0);
  SolveConfig config;
  config.time_limit_seconds = 0.0;
  auto res = solve_milp(model, {}, config);
  REQUIRE(res.status == SolveStatus::kTimeLimit);
  REQUIRE(res.gap_percent == 100.0);
  REQUIRE(res.solution.empty());
}

TEST_CASE("random binary programs match brute force") {
  std::mt19937_64 rng(77);
  SolveConfig config;
  int optimal = 0;
  for (int t = 0; t < 150; ++t) {
    auto model = random_binary_milp(rng, 3 + int(rng() % 8), 1 + int(rng() % 5));
    const double expect = brute_force_min(model);
    auto res = solve_milp(model, {}, config);
    if (std::isfinite(expect)) {
      REQUIRE(res.status == SolveStatus::kOptimal);
      REQUIRE(res.objective == Approx(expect).margin(1e-7));
      ++optimal;
    } else {
      REQUIRE(res.status == SolveStatus::kInfeasible);
    }
  }
  REQUIRE(optimal > 40);
}

TEST_CASE("determinism: identical inputs give identical runs") {
  std::mt19937_64 rng(31);
  auto model = random_binary_milp(rng, 9, 4);
  SolveConfig config;
  auto a = solve_milp(model, {}, config);
  auto b = solve_milp(model, {}, config);
  REQUIRE(a.status == b.status);
  REQUIRE(a.nodes == b.nodes);
  REQUIRE(a.objective == b.objective);
  REQUIRE(a.solution == b.solution);
}

TEST_CASE("terminal bound never exceeds the incumbent objective") {
  std::mt19937_64 rng(37);
  SolveConfig config;
  for (int t = 0; t < 60; ++t) {
    auto model = random_binary_milp(rng, 8, 4);
    auto res = solve_milp(model, {}, config);
    if (res.status == SolveStatus::kOptimal) {
      REQUIRE(res.bound == res.objective);
      REQUIRE(res.gap_percent == 0.0);
    } else if (res.status == SolveStatus::kTimeLimit && !res.solution.empty()) {
      REQUIRE(res.bound <= res.objective + 1e-9);
    }
  }
}

TEST_CASE("lazy row delivery reaches the structural optimum") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    auto model = random_binary_milp(rng, 7, 4);
    SolveConfig config;
    const auto direct = solve_milp(model, {}, config);

    // Same model with every row delivered lazily.
    MilpModel relaxed = model;
    relaxed.lp.rows.clear();
    MilpCallbacks callbacks;
    callbacks.lazy = [&](const std::vector<double>& point) {
      std::vector<TaggedRow> out;
      for (const auto& row : model.lp.rows) {
        double lhs = 0;
        for (auto [col, val] : row.coeffs) lhs += val * point[col];
        if (lhs < row.rhs - 1e-7) out.push_back({row, "lazy"});
      }
      return out;
    };
    const auto lazy = solve_milp(relaxed, callbacks, config);
    REQUIRE(lazy.status == direct.status);
    if (direct.status == SolveStatus::kOptimal)
      REQUIRE(lazy.objective == Approx(direct.objective).margin(1e-7));
  }
}

TEST_CASE("warm incumbent is kept when already optimal") {
  MilpModel model;
  model.lp.add_column(3.0, 0.0, 1.0);
  model.lp.add_column(5.0, 0.0, 1.0);
  model.integer_cols = {0, 1};
  model.lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::kGe, 1.0);
  WarmIncumbent warm;
  warm.solution = {1.0, 0.0};
  warm.objective = 3.0;
  SolveConfig config;
  auto res = solve_milp(model, {}, config, &warm);
  REQUIRE(res.status == SolveStatus::kOptimal);
  REQUIRE(res.objective == Approx(3.0));
  REQUIRE(res.solution[0] == Approx(1.0));
}

TEST_CASE("branch priorities defer follower binaries") {
  // Objective pressure keeps y fractional unless branched; x tier first.
  MilpModel model;
  model.lp.add_column(2.0, 0.0, 1.0);  // x
  model.lp.add_column(1.0, 0.0, 1.0);  // y (follower)
  model.integer_cols = {0, 1};
  model.branch_priority = {0, 1};
  model.lp.add_row({{0, 2.0}, {1, 2.0}}, RowSense::kGe, 3.0);
  SolveConfig config;
  auto res = solve_milp(model, {}, config);
  REQUIRE(res.status == SolveStatus::kOptimal);
  REQUIRE(res.objective == Approx(3.0));  // x = y = 1
}

TEST_CASE("cut translation covers every master variable block") {
  std::mt19937_64 rng(5);
  auto inst = testing::make_random_instance(rng, 4, 2, 3, 2.0, 0.2, 0.25);
  GammaGrid grid;
  grid.values = {1.0, std::sqrt(2.0)};
  grid.powers = {1, 2};
  auto master = build_master(inst, SolveMode::kPlusCross, &grid);
  LinearCut cut;
  cut.x_coeffs = {1.0, 0.0, -2.0, 0.0};
  cut.gamma_coeff = -1.0;
  cut.z_coeffs = {{1, -1.0}};
  cut.gamma_bit_coeffs = {0.0, -0.5};
  cut.rhs = -3.0;
  auto row = master.to_row(cut);
  REQUIRE(row.sense == RowSense::kGe);
  REQUIRE(row.rhs == -3.0);
  // x0, x2, two expanded gamma columns, z1, and the lifted bit column.
  REQUIRE(row.coeffs.size() == 6);
  double gamma_coef_r1 = 0.0;
  for (auto [col, val] : row.coeffs)
    if (col == master.gamma_bits_begin) gamma_coef_r1 = val;
  REQUIRE(gamma_coef_r1 == Approx(-1.0 * grid.values[0]));
}
