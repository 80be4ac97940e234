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
//
// End-to-end solve entry points: the robust covering solver in its three cut
// modes, the sample-average baseline, and exhaustive oracles for desk-scale
// verification.

#ifndef DRCOVER_SOLVERS_HPP_
#define DRCOVER_SOLVERS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "drcover/bnc.hpp"
#include "drcover/hull_cuts.hpp"
#include "drcover/mixing.hpp"
#include "drcover/model.hpp"
#include "drcover/risk.hpp"
#include "drcover/scenario_cuts.hpp"

namespace drcover {

namespace internal {

/// Deterministic greedy member of the feasible region with reverse pruning;
/// nullopt when even the all-ones selection fails membership.
inline std::optional<std::vector<int>> greedy_member(const Instance& inst) {
  const int n = inst.n_elements;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return inst.cost[a] < inst.cost[b]; });
  std::vector<int> x(n, 0);
  bool member = false;
  for (int k : order) {
    x[k] = 1;
    if (z_membership(x, inst)) {
      member = true;
      break;
    }
  }
  if (!member) return std::nullopt;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (x[*it] == 0) continue;
    x[*it] = 0;
    if (!z_membership(x, inst)) x[*it] = 1;
  }
  return x;
}

/// Full master-space vector for a member x: gamma at the empirical quantile
/// of its scores (always admissible, and on the grid in the encoded mode)
/// and the componentwise tightest z.
inline std::vector<double> master_point_for(const MasterModel& master,
                                            const Instance& inst,
                                            std::span<const int> x) {
  auto sm = scenario_margins(x, inst);
  std::vector<double> neg(sm.g.size());
  for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -sm.g[j];
  const double gamma = -var_cvar(std::move(neg), inst.epsilon).var;
  std::vector<double> point(master.milp.lp.num_cols(), 0.0);
  for (int k = 0; k < inst.n_elements; ++k) point[master.x_begin + k] = x[k];
  if (master.gamma_col >= 0) {
    point[master.gamma_col] = gamma;
  } else {
    int slot = 0;
    for (int k = 0; k < master.grid.size(); ++k)
      if (std::fabs(master.grid.values[k] - gamma) <
          std::fabs(master.grid.values[slot] - gamma))
        slot = k;
    point[master.gamma_bits_begin + slot] = 1.0;
  }
  for (int j = 0; j < inst.n_scenarios; ++j)
    point[master.z_begin + j] = std::min(0.0, sm.g[j] - gamma);
  return point;
}

/// Scenario separation shared by the solver callback and the root-round
/// bound probe. Appends benders / hull / mixing cuts violated at the point.
struct DrcSeparator {
  const Instance* inst = nullptr;
  const MasterModel* master = nullptr;
  SolveConfig config;
  std::vector<BaseInequality> pool;  // cross mode, FIFO
  static constexpr int kPoolCap = 200;

  void pool_add(const LinearCut& cut) {
    if (master->mode != SolveMode::kPlusCross) return;
    if (!(cut.epi_slope < 0.0)) return;
    pool.push_back(base_from_cut(cut));
    if (static_cast<int>(pool.size()) > kPoolCap)
      pool.erase(pool.begin(), pool.begin() + (pool.size() - kPoolCap));
  }

  std::vector<TaggedRow> separate(const std::vector<double>& point) {
    const int n = inst->n_elements;
    std::vector<double> x_hat(point.begin() + master->x_begin,
                              point.begin() + master->x_begin + n);
    std::vector<int> x_int(n);
    for (int k = 0; k < n; ++k) x_int[k] = x_hat[k] >= 0.5 ? 1 : 0;
    const double gamma_hat = master->gamma_of(point);
    std::vector<double> z_hat(inst->n_scenarios);
    for (int j = 0; j < inst->n_scenarios; ++j)
      z_hat[j] = point[master->z_begin + j];

    std::vector<TaggedRow> rows;
    const double tol = config.tolerances.cut_violation;
    int benders_added = 0;
    for (int j = 0; j < inst->n_scenarios; ++j) {
      if (config.max_benders_cuts_per_round > 0 &&
          benders_added >= config.max_benders_cuts_per_round)
        break;
      const auto dual = dual_solution(x_int, *inst, j);
      const double q_min = std::min(-dual.objective, 0.0);
      if (-z_hat[j] - gamma_hat >= q_min - tol) continue;
      auto bcut = benders_cut(x_hat, gamma_hat, z_hat[j], *inst, j, tol);
      if (!bcut) continue;
      ++benders_added;
      rows.push_back({master->to_row(*bcut), "benders"});
      pool_add(*bcut);
      if (master->mode != SolveMode::kTwoStage) {
        auto hull = single_scenario_cut(x_hat, gamma_hat, z_hat[j], *inst, j,
                                        dual.i_star, tol,
                                        config.max_hull_cuts_per_scenario);
        for (auto& cut : hull) {
          rows.push_back({master->to_row(cut), "hull"});
          pool_add(cut);
        }
      }
    }
    if (master->mode == SolveMode::kPlusCross && !pool.empty()) {
      auto bits = master->gamma_bits_of(point);
      if (auto mix = separate_mixing(x_hat, z_hat, bits, pool, master->grid, tol))
        rows.push_back({master->to_row(*mix), "mixing"});
    }
    return rows;
  }
};

}  // namespace internal

/// Exact solve of the robust chance-constrained covering model.
inline Solution solve_drc(const Instance& inst, const SolveConfig& config) {
  validate_instance(inst);
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  Solution sol;
  GammaGrid grid;
  if (config.mode == SolveMode::kPlusCross) {
    grid = gamma_grid(inst);
    if (grid.infeasible()) {
      sol.status = SolveStatus::kInfeasible;
      sol.wall_seconds = wall();
      return sol;
    }
  }
  MasterModel master = build_master(inst, config.mode,
                                    config.mode == SolveMode::kPlusCross
                                        ? &grid
                                        : nullptr);
  internal::DrcSeparator sep;
  sep.inst = &inst;
  sep.master = &master;
  sep.config = config;

  MilpCallbacks callbacks;
  callbacks.lazy = [&sep](const std::vector<double>& point) {
    return sep.separate(point);
  };

  WarmIncumbent warm;
  const WarmIncumbent* warm_ptr = nullptr;
  if (auto greedy = internal::greedy_member(inst)) {
    warm.solution = internal::master_point_for(master, inst, *greedy);
    warm.objective = 0.0;
    for (int k = 0; k < inst.n_elements; ++k)
      warm.objective += inst.cost[k] * (*greedy)[k];
    warm_ptr = &warm;
  }

  auto res = solve_milp(master.milp, callbacks, config, warm_ptr);
  sol.status = res.status;
  sol.gap_percent = res.gap_percent;
  sol.cut_counts = res.cut_counts;
  sol.wall_seconds = wall();
  if (!res.solution.empty()) {
    sol.objective = res.objective;
    sol.x.resize(inst.n_elements);
    for (int k = 0; k < inst.n_elements; ++k)
      sol.x[k] = res.solution[master.x_begin + k] >= 0.5 ? 1 : 0;
  }
  return sol;
}

/// Sample-average baseline: min c.x with at least a 1-eps fraction of the
/// training scenarios fully covered; big-M rows with v_m and binary z_j,
/// solved by the same engine. Coverage rows are delivered lazily when the
/// row block is large.
inline Solution solve_saa(const Instance& inst, const SolveConfig& config) {
  validate_instance(inst);
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  const int n = inst.n_elements;
  const int n_scen = inst.n_scenarios;
  const int v_m = inst.max_coverage();

  MilpModel model;
  for (int k = 0; k < n; ++k) {
    model.lp.add_column(inst.cost[k], 0.0, 1.0);
    model.integer_cols.push_back(k);
    model.branch_priority.push_back(0);
  }
  const int z_begin = model.lp.num_cols();
  for (int j = 0; j < n_scen; ++j) {
    const int col = model.lp.add_column(0.0, 0.0, 1.0);
    model.integer_cols.push_back(col);
    model.branch_priority.push_back(1);
  }
  {
    LinearProgram::Row row;
    row.sense = RowSense::kGe;
    row.rhs = 1.0 - inst.epsilon;
    for (int j = 0; j < n_scen; ++j)
      row.coeffs.emplace_back(z_begin + j, 1.0 / n_scen);
    model.lp.rows.push_back(std::move(row));
  }
  auto coverage_row = [&](int i, int j) {
    // x . xi^j_i - v_m z_j >= v_i - v_m.
    LinearProgram::Row row;
    row.sense = RowSense::kGe;
    row.rhs = inst.coverage[i] - v_m;
    auto xi = inst.scenario_row(j, i);
    for (int k = 0; k < n; ++k)
      if (xi[k]) row.coeffs.emplace_back(k, 1.0);
    row.coeffs.emplace_back(z_begin + j, -double(v_m));
    return row;
  };
  const bool structural = static_cast<long long>(n_scen) * inst.n_targets <= 600;
  if (structural)
    for (int j = 0; j < n_scen; ++j)
      for (int i = 0; i < inst.n_targets; ++i)
        model.lp.rows.push_back(coverage_row(i, j));

  const long long need =
      static_cast<long long>(std::ceil(n_scen * (1.0 - inst.epsilon) - 1e-9));
  auto covered_count = [&](const std::vector<int>& x) {
    long long covered = 0;
    for (int j = 0; j < n_scen; ++j)
      if (min_margin(x, inst, j) >= 1) ++covered;
    return covered;
  };

  MilpCallbacks callbacks;
  // One most-violated coverage row per scenario per round keeps the working
  // LP near N rows instead of N x I.
  auto separate_rows = [&, z_begin](const std::vector<double>& point) {
    std::vector<TaggedRow> rows;
    for (int j = 0; j < n_scen; ++j) {
      const double zj = point[z_begin + j];
      if (zj <= 1e-9) continue;
      int worst_i = -1;
      double worst = -1e-7;
      for (int i = 0; i < inst.n_targets; ++i) {
        auto xi = inst.scenario_row(j, i);
        double dot = 0;
        for (int k = 0; k < n; ++k)
          if (xi[k]) dot += point[k];
        const double violation = inst.coverage[i] - v_m - (dot - v_m * zj);
        if (violation > worst) {
          worst = violation;
          worst_i = i;
        }
      }
      if (worst_i >= 0) rows.push_back({coverage_row(worst_i, j), "coverage"});
      if (rows.size() >= 200) break;
    }
    return rows;
  };
  // An integral selection short of the coverage threshold stays short on all
  // of its subsets, so some unselected element is required.
  auto no_good = [&, z_begin](const std::vector<double>& point) {
    std::vector<TaggedRow> rows;
    std::vector<int> x(n);
    for (int k = 0; k < n; ++k) {
      x[k] = point[k] >= 0.5 ? 1 : 0;
      if (std::fabs(point[k] - x[k]) > config.tolerances.integrality) return rows;
    }
    if (covered_count(x) >= need) return rows;
    LinearProgram::Row row;
    row.sense = RowSense::kGe;
    row.rhs = 1.0;
    for (int k = 0; k < n; ++k)
      if (!x[k]) row.coeffs.emplace_back(k, 1.0);
    if (!row.coeffs.empty()) rows.push_back({std::move(row), "nogood"});
    return rows;
  };
  if (!structural) {
    callbacks.lazy = separate_rows;
    callbacks.user = [&](const std::vector<double>& point) {
      auto rows = no_good(point);
      auto more = separate_rows(point);
      rows.insert(rows.end(), more.begin(), more.end());
      return rows;
    };
  } else {
    callbacks.lazy = [](const std::vector<double>&) {
      return std::vector<TaggedRow>{};
    };
    callbacks.user = no_good;
  }
  WarmIncumbent warm;
  const WarmIncumbent* warm_ptr = nullptr;
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return inst.cost[a] < inst.cost[b]; });
    std::vector<int> x(n, 0);
    bool feasible = covered_count(x) >= need;
    for (int k : order) {
      if (feasible) break;
      x[k] = 1;
      feasible = covered_count(x) >= need;
    }
    if (feasible) {
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (x[*it] == 0) continue;
        x[*it] = 0;
        if (covered_count(x) < need) x[*it] = 1;
      }
      warm.solution.assign(model.lp.num_cols(), 0.0);
      warm.objective = 0.0;
      for (int k = 0; k < n; ++k) {
        warm.solution[k] = x[k];
        warm.objective += inst.cost[k] * x[k];
      }
      for (int j = 0; j < n_scen; ++j)
        warm.solution[z_begin + j] = min_margin(x, inst, j) >= 1 ? 1.0 : 0.0;
      warm_ptr = &warm;
    }
  }

  auto res = solve_milp(model, callbacks, config, warm_ptr);
  Solution sol;
  sol.status = res.status;
  sol.gap_percent = res.gap_percent;
  sol.cut_counts = res.cut_counts;
  sol.wall_seconds = wall();
  if (!res.solution.empty()) {
    sol.objective = res.objective;
    sol.x.resize(n);
    for (int k = 0; k < n; ++k) sol.x[k] = res.solution[k] >= 0.5 ? 1 : 0;
  }
  return sol;
}

namespace internal {

inline bool grid_membership(std::span<const int> x, const Instance& inst,
                            const GammaGrid& grid, double tol = 1e-7) {
  auto sm = scenario_margins(x, inst);
  for (double r : grid.values) {
    double sum_z = 0.0;
    for (double g : sm.g) sum_z += std::min(0.0, g - r);
    if (inst.delta - r * inst.epsilon <= sum_z / inst.n_scenarios + tol)
      return true;
  }
  return false;
}

}  // namespace internal

/// Exhaustive oracle: cheapest member over all 2^n selections, scanned by
/// popcount layers with cost pruning. Guarded to n <= 25.
inline Solution enumerate_optimum(const Instance& inst,
                                  const GammaGrid* restrict_grid = nullptr) {
  validate_instance(inst);
  if (inst.n_elements > 25)
    throw std::invalid_argument("enumerate_optimum: n exceeds the 25-bit guard");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = inst.n_elements;
  Solution sol;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  std::vector<int> x(n);
  auto consider = [&](std::uint32_t mask) {
    double cost = 0;
    for (int k = 0; k < n; ++k)
      if ((mask >> k) & 1) cost += inst.cost[k];
    if (cost >= best) return;
    for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1;
    const bool member = restrict_grid != nullptr
                            ? internal::grid_membership(x, inst, *restrict_grid)
                            : z_membership(x, inst);
    if (member) {
      best = cost;
      best_mask = mask;
    }
  };
  for (int pc = 0; pc <= n; ++pc) {
    if (pc == 0) {
      consider(0);
      continue;
    }
    std::uint32_t mask = (1u << pc) - 1;
    const std::uint32_t limit = 1u << n;
    while (mask < limit) {
      consider(mask);
      // Gosper's hack: next subset with the same popcount.
      const std::uint32_t c = mask & -mask;
      const std::uint32_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
      if (r >= limit) break;
    }
  }
  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (std::isfinite(best)) {
    sol.status = SolveStatus::kOptimal;
    sol.objective = best;
    sol.x.resize(n);
    for (int k = 0; k < n; ++k) sol.x[k] = (best_mask >> k) & 1;
  } else {
    sol.status = SolveStatus::kInfeasible;
  }
  return sol;
}

/// Root relaxation bounds after one separation round at a point shared by
/// all three modes: x from the rounded continuous-master LP optimum, the
/// minimal structurally feasible certificate (gamma = delta/eps, z = 0), and
/// cumulative cut families, so the three relaxations are provably nested.
struct RootBounds {
  double two_stage = std::numeric_limits<double>::infinity();
  double plus_single = std::numeric_limits<double>::infinity();
  double plus_cross = std::numeric_limits<double>::infinity();
};

inline RootBounds root_bound_one_round(const Instance& inst,
                                       const SolveConfig& base_config = {}) {
  validate_instance(inst);
  RootBounds bounds;
  MasterModel cont = build_master(inst, SolveMode::kTwoStage);
  SimplexContext probe(cont.milp.lp);
  auto lp0 = probe.solve();
  if (lp0.status != LpStatus::kOptimal) return bounds;  // infeasible root

  const int n = inst.n_elements;
  std::vector<double> x_hat(n);
  std::vector<int> x_int(n);
  for (int k = 0; k < n; ++k) {
    x_hat[k] = std::round(lp0.primal[cont.x_begin + k]);
    x_int[k] = x_hat[k] >= 0.5 ? 1 : 0;
  }
  const double gamma_hat = inst.delta / inst.epsilon;
  const double tol = base_config.tolerances.cut_violation;

  std::vector<LinearCut> benders_round, hull_round;
  for (int j = 0; j < inst.n_scenarios; ++j) {
    const auto dual = dual_solution(x_int, inst, j);
    if (auto cut = benders_cut(x_hat, gamma_hat, 0.0, inst, j, tol)) {
      benders_round.push_back(*cut);
      for (auto& h : single_scenario_cut(x_hat, gamma_hat, 0.0, inst, j,
                                         dual.i_star, tol))
        hull_round.push_back(h);
    }
  }

  auto bound_of = [&](const MasterModel& master,
                      std::span<const LinearCut> cuts,
                      const LinearCut* extra) {
    SimplexContext ctx(master.milp.lp);
    for (const auto& cut : cuts) ctx.add_row(master.to_row(cut));
    if (extra != nullptr) ctx.add_row(master.to_row(*extra));
    auto out = ctx.solve();
    return out.status == LpStatus::kOptimal
               ? out.objective
               : std::numeric_limits<double>::infinity();
  };

  bounds.two_stage = bound_of(cont, benders_round, nullptr);
  std::vector<LinearCut> both = benders_round;
  both.insert(both.end(), hull_round.begin(), hull_round.end());
  bounds.plus_single = bound_of(cont, both, nullptr);

  GammaGrid grid = gamma_grid(inst);
  if (grid.infeasible()) return bounds;  // cross bound stays +inf
  MasterModel cross = build_master(inst, SolveMode::kPlusCross, &grid);
  std::vector<BaseInequality> pool;
  for (const auto& cut : both)
    if (cut.epi_slope < 0.0) pool.push_back(base_from_cut(cut));
  std::optional<LinearCut> mix;
  if (!pool.empty()) {
    std::vector<double> z_hat(inst.n_scenarios, 0.0);
    std::vector<double> bits(grid.size(), 0.0);
    bits[0] = 1.0;
    mix = separate_mixing(x_hat, z_hat, bits, pool, grid, tol);
  }
  bounds.plus_cross = bound_of(cross, both, mix ? &*mix : nullptr);
  return bounds;
}

}  // namespace drcover

#endif  // DRCOVER_SOLVERS_HPP_
