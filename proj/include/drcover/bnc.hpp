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
// Deterministic branch-and-cut over binary variables: best-bound node
// selection with FIFO tie-break, most-fractional branching (lowest index on
// ties), lazy rows at integral candidates, optional user rows at fractional
// points, and a bounded root separation loop at rounded points. Single
// threaded by contract; independent solves may run in parallel threads.

#ifndef DRCOVER_BNC_HPP_
#define DRCOVER_BNC_HPP_

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "drcover/linear_cut.hpp"
#include "drcover/lp.hpp"
#include "drcover/mixing.hpp"
#include "drcover/model.hpp"

namespace drcover {

struct MilpModel {
  LinearProgram lp;
  std::vector<int> integer_cols;  // binary columns, bounds within [0, 1]
  // Optional branching tiers per integer column (lower first); empty means
  // one tier. Lets masters branch decision binaries before follower binaries.
  std::vector<int> branch_priority;
};

struct TaggedRow {
  LinearProgram::Row row;
  std::string family;
};

struct MilpCallbacks {
  /// Called where every integer column is integral; empty result accepts the
  /// point as an incumbent. Rows must be valid for the full model.
  std::function<std::vector<TaggedRow>(const std::vector<double>&)> lazy;
  /// Optional separation at fractional points.
  std::function<std::vector<TaggedRow>(const std::vector<double>&)> user;
};

struct MilpResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> solution;  // full column vector, empty if no incumbent
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double gap_percent = 100.0;
  long nodes = 0;
  std::map<std::string, long long> cut_counts;
  double wall_seconds = 0.0;
  double root_bound = std::numeric_limits<double>::quiet_NaN();
};

struct WarmIncumbent {
  std::vector<double> solution;
  double objective = std::numeric_limits<double>::infinity();
};

class BranchAndCut {
 public:
  BranchAndCut(const MilpModel& model, MilpCallbacks callbacks, SolveConfig config)
      : model_(model),
        callbacks_(std::move(callbacks)),
        config_(std::move(config)),
        ctx_(model.lp) {
    if (model.lp.maximize)
      throw std::invalid_argument("branch-and-cut expects a minimization model");
    for (int col : model.integer_cols) {
      if (model.lp.lower[col] < -1e-12 || model.lp.upper[col] > 1.0 + 1e-12)
        throw std::invalid_argument("integer columns must live in [0,1]");
    }
  }

  MilpResult solve(const WarmIncumbent* warm = nullptr, int root_rounds = 20) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
    };
    MilpResult res;
    if (warm != nullptr && !warm->solution.empty()) {
      incumbent_ = warm->solution;
      ub_ = warm->objective;
    }

    nodes_.push_back(Node{-std::numeric_limits<double>::infinity(), -1, -1, 0, 0});
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    heap.push({nodes_[0].bound, 0});
    long processed = 0;
    int root_rounds_left = root_rounds;
    bool timed_out = elapsed() >= config_.time_limit_seconds;

    while (!heap.empty() && !timed_out) {
      const auto [hbound, node_id] = heap.top();
      heap.pop();
      if (hbound >= ub_ - prune_margin()) continue;
      apply_bounds(node_id);
      ++processed;

      bool node_open = true;
      while (node_open) {
        if (elapsed() >= config_.time_limit_seconds) {
          timed_out = true;
          // The node is still open at its last known bound.
          heap.push({nodes_[node_id].bound, node_id});
          break;
        }
        LpOutcome out = ctx_.solve();
        if (out.status == LpStatus::kFailure) {
          ctx_.reset_to_slack_basis();
          out = ctx_.solve();
        }
        if (out.status == LpStatus::kInfeasible) break;
        if (out.status == LpStatus::kUnbounded) {
          res.status = SolveStatus::kUnboundedGuard;
          res.wall_seconds = elapsed();
          res.nodes = processed;
          res.cut_counts = cut_counts_;
          return res;
        }
        if (out.status == LpStatus::kFailure)
          throw std::runtime_error("branch-and-cut: LP solver breakdown");
        nodes_[node_id].bound = out.objective;
        if (node_id == 0) res.root_bound = out.objective;
        age_cut_rows(out.primal);
        if (out.objective >= ub_ - prune_margin()) break;

        const int frac_col = most_fractional(out.primal);
        if (frac_col < 0) {
          auto point = snapped(out.primal);
          const auto rows = callbacks_.lazy ? callbacks_.lazy(point)
                                            : std::vector<TaggedRow>{};
          if (!rows.empty()) {
            if (add_new_rows(rows) > 0) continue;  // re-solve with the new rows
            // All returned rows were already present: the LP satisfies them,
            // so the claimed violation is below the solver's noise floor.
            ++cut_counts_["lazy_stall"];
          }
          // Incumbent; its objective is exact at the snapped point.
          double obj = 0.0;
          for (int col = 0; col < model_.lp.num_cols(); ++col)
            obj += model_.lp.objective[col] * point[col];
          ub_ = obj;
          incumbent_ = std::move(point);
          break;
        }

        if (node_id == 0 && root_rounds_left > 0) {
          --root_rounds_left;
          auto rounded = snapped(out.primal, /*force=*/true);
          int added = callbacks_.lazy ? add_new_rows(callbacks_.lazy(rounded)) : 0;
          if (callbacks_.user) added += add_new_rows(callbacks_.user(out.primal));
          if (added > 0) continue;
        } else if (callbacks_.user && user_rounds_left_ > 0) {
          --user_rounds_left_;
          if (add_new_rows(callbacks_.user(out.primal)) > 0) continue;
        }

        // Branch.
        const int next_depth = nodes_[node_id].depth + 1;
        for (int val : {0, 1}) {
          nodes_.push_back(Node{out.objective, node_id, frac_col,
                                static_cast<std::int8_t>(val), next_depth});
          heap.push({out.objective, static_cast<long>(nodes_.size()) - 1});
        }
        node_open = false;
      }
      if (node_id == 0) root_rounds_left = 0;
      user_rounds_left_ = kUserRoundsPerNode;
      maybe_purge();
    }

    // Global lower bound from the open frontier.
    double lb = heap.empty() ? ub_ : std::numeric_limits<double>::infinity();
    while (!heap.empty()) {
      lb = std::min(lb, heap.top().bound);
      heap.pop();
    }
    if (!incumbent_.empty()) lb = std::min(lb, ub_);

    res.nodes = processed;
    res.cut_counts = cut_counts_;
    res.wall_seconds = elapsed();
    if (!incumbent_.empty()) {
      res.solution = incumbent_;
      res.objective = ub_;
      if (timed_out) {
        res.status = SolveStatus::kTimeLimit;
        res.bound = lb;
        res.gap_percent =
            std::isfinite(lb)
                ? 100.0 * (ub_ - lb) / std::max(std::fabs(ub_), 1e-9)
                : 100.0;
      } else {
        res.status = SolveStatus::kOptimal;
        res.bound = ub_;
        res.gap_percent = 0.0;
      }
    } else {
      res.status = timed_out ? SolveStatus::kTimeLimit : SolveStatus::kInfeasible;
      res.bound = lb;
      res.gap_percent = 100.0;
    }
    return res;
  }

 private:
  struct Node {
    double bound;
    long parent;
    int fix_col;
    std::int8_t fix_val;
    int depth;
  };
  struct HeapEntry {
    double bound;
    long id;
    friend bool operator>(const HeapEntry& a, const HeapEntry& b) {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  static constexpr int kUserRoundsPerNode = 5;

  double prune_margin() const {
    if (!std::isfinite(ub_)) return 0.0;
    return std::max(1e-9, std::fabs(ub_) * 1e-9);
  }

  void apply_bounds(long node_id) {
    for (int col : model_.integer_cols) ctx_.set_bounds(col, 0.0, 1.0);
    for (long cur = node_id; cur > 0; cur = nodes_[cur].parent) {
      const auto& nd = nodes_[cur];
      ctx_.set_bounds(nd.fix_col, nd.fix_val, nd.fix_val);
    }
  }

  // Most fractional = largest distance to the nearest integer (closest to
  // one half); ties keep the lowest column index; lower branching tiers are
  // exhausted first. Returns -1 when integral.
  int most_fractional(const std::vector<double>& primal) const {
    int best = -1, best_tier = std::numeric_limits<int>::max();
    double best_score = 0.0;
    for (std::size_t i = 0; i < model_.integer_cols.size(); ++i) {
      const int col = model_.integer_cols[i];
      const double frac = std::fabs(primal[col] - std::round(primal[col]));
      if (frac <= config_.tolerances.integrality) continue;
      const int tier =
          model_.branch_priority.empty() ? 0 : model_.branch_priority[i];
      if (tier < best_tier || (tier == best_tier && frac > best_score + 1e-12)) {
        best_tier = tier;
        best_score = frac;
        best = col;
      }
    }
    return best;
  }

  std::vector<double> snapped(const std::vector<double>& primal,
                              bool force = false) const {
    std::vector<double> point = primal;
    for (int col : model_.integer_cols) {
      const double r = std::round(point[col]);
      if (force || std::fabs(point[col] - r) <= config_.tolerances.integrality)
        point[col] = std::min(1.0, std::max(0.0, r));
    }
    return point;
  }

  std::vector<long long> row_key(const LinearProgram::Row& row) const {
    std::vector<long long> key;
    key.reserve(2 * row.coeffs.size() + 2);
    auto sorted = row.coeffs;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [col, val] : sorted) {
      key.push_back(col);
      key.push_back(llround(val * 1e9));
    }
    key.push_back(static_cast<long long>(row.sense));
    key.push_back(llround(row.rhs * 1e9));
    return key;
  }

  int add_new_rows(const std::vector<TaggedRow>& rows) {
    int added = 0;
    for (const auto& tagged : rows) {
      auto key = row_key(tagged.row);
      if (!seen_rows_.insert(key).second) continue;
      ctx_.add_row(tagged.row);
      cut_rows_.push_back(CutRecord{tagged.row, std::move(key), 0});
      ++cut_counts_[tagged.family];
      ++added;
    }
    return added;
  }

  // Ages cut rows by slackness at the node's LP point.
  void age_cut_rows(const std::vector<double>& primal) {
    for (auto& rec : cut_rows_) {
      double lhs = 0.0;
      for (const auto& [col, val] : rec.row.coeffs) lhs += val * primal[col];
      const double slack = lhs - rec.row.rhs;  // >=-rows: slack >= 0
      const bool binding = std::fabs(slack) <= 1e-6 * (1.0 + std::fabs(rec.row.rhs));
      rec.idle = binding ? 0 : rec.idle + 1;
    }
  }

  // Drops long-idle cut rows and rebuilds a compact solver context. Removed
  // rows become re-addable (their dedupe keys are released); the lazy loop
  // restores any that still matter, so bounds stay valid throughout.
  void maybe_purge() {
    if (static_cast<int>(cut_rows_.size()) < kPurgeMinRows) return;
    int drop = 0;
    for (const auto& rec : cut_rows_)
      if (rec.idle >= kPurgeIdle) ++drop;
    if (drop * 4 < static_cast<int>(cut_rows_.size())) return;
    std::vector<CutRecord> keep;
    keep.reserve(cut_rows_.size() - drop);
    for (auto& rec : cut_rows_) {
      if (rec.idle >= kPurgeIdle) {
        seen_rows_.erase(rec.key);
      } else {
        keep.push_back(std::move(rec));
      }
    }
    cut_rows_ = std::move(keep);
    LinearProgram lp = model_.lp;
    for (const auto& rec : cut_rows_) lp.rows.push_back(rec.row);
    ctx_ = SimplexContext(lp);
  }

  struct CutRecord {
    LinearProgram::Row row;
    std::vector<long long> key;
    int idle = 0;
  };
  static constexpr int kPurgeIdle = 8;
  static constexpr int kPurgeMinRows = 250;

  const MilpModel& model_;
  MilpCallbacks callbacks_;
  SolveConfig config_;
  SimplexContext ctx_;
  std::vector<Node> nodes_;
  std::vector<double> incumbent_;
  double ub_ = std::numeric_limits<double>::infinity();
  std::map<std::string, long long> cut_counts_;
  std::set<std::vector<long long>> seen_rows_;
  std::vector<CutRecord> cut_rows_;
  int user_rounds_left_ = kUserRoundsPerNode;
};

inline MilpResult solve_milp(const MilpModel& model, const MilpCallbacks& callbacks,
                             const SolveConfig& config,
                             const WarmIncumbent* warm = nullptr,
                             int root_rounds = 20) {
  BranchAndCut engine(model, callbacks, config);
  return engine.solve(warm, root_rounds);
}

/// Master problem container for the robust covering reformulation: binaries
/// x, scenario slacks z <= 0, and either one continuous gamma or its one-hot
/// grid encoding. Scenario constraints arrive lazily as cuts.
struct MasterModel {
  MilpModel milp;
  SolveMode mode = SolveMode::kTwoStage;
  int n = 0;
  int n_scen = 0;
  int x_begin = 0;
  int gamma_col = -1;
  int gamma_bits_begin = -1;
  int z_begin = 0;
  GammaGrid grid;

  double gamma_of(const std::vector<double>& point) const {
    if (gamma_col >= 0) return point[gamma_col];
    double g = 0.0;
    for (int k = 0; k < grid.size(); ++k)
      g += grid.values[k] * point[gamma_bits_begin + k];
    return g;
  }

  std::vector<double> gamma_bits_of(const std::vector<double>& point) const {
    std::vector<double> bits(std::max(grid.size(), 0), 0.0);
    for (int k = 0; k < grid.size(); ++k) bits[k] = point[gamma_bits_begin + k];
    return bits;
  }

  LinearProgram::Row to_row(const LinearCut& cut) const {
    LinearProgram::Row row;
    row.sense = RowSense::kGe;
    row.rhs = cut.rhs;
    for (int k = 0; k < n; ++k)
      if (cut.x_coeffs[k] != 0.0) row.coeffs.emplace_back(x_begin + k, cut.x_coeffs[k]);
    if (cut.gamma_coeff != 0.0) {
      if (gamma_col >= 0) {
        row.coeffs.emplace_back(gamma_col, cut.gamma_coeff);
      } else {
        for (int k = 0; k < grid.size(); ++k)
          row.coeffs.emplace_back(gamma_bits_begin + k,
                                  cut.gamma_coeff * grid.values[k]);
      }
    }
    for (const auto& [j, c] : cut.z_coeffs)
      if (c != 0.0) row.coeffs.emplace_back(z_begin + j, c);
    for (std::size_t k = 0; k < cut.gamma_bit_coeffs.size(); ++k)
      if (cut.gamma_bit_coeffs[k] != 0.0)
        row.coeffs.emplace_back(gamma_bits_begin + static_cast<int>(k),
                                cut.gamma_bit_coeffs[k]);
    return row;
  }
};

/// Builds the master. In the encoded mode the grid is required and must be
/// nonempty (an empty grid certifies infeasibility before any search).
inline MasterModel build_master(const Instance& inst, SolveMode mode,
                                const GammaGrid* grid = nullptr) {
  MasterModel master;
  master.mode = mode;
  master.n = inst.n_elements;
  master.n_scen = inst.n_scenarios;
  const double score_cap = std::pow(static_cast<double>(inst.n_elements),
                                    1.0 / inst.p);
  auto& lp = master.milp.lp;
  master.x_begin = 0;
  for (int k = 0; k < inst.n_elements; ++k) {
    lp.add_column(inst.cost[k], 0.0, 1.0);
    master.milp.integer_cols.push_back(k);
  }
  master.milp.branch_priority.assign(inst.n_elements, 0);
  if (mode == SolveMode::kPlusCross) {
    if (grid == nullptr)
      throw std::invalid_argument("build_master: grid required in cross mode");
    if (grid->infeasible())
      throw std::invalid_argument("build_master: empty grid certifies infeasibility");
    master.grid = *grid;
    master.gamma_bits_begin = lp.num_cols();
    for (int k = 0; k < master.grid.size(); ++k) {
      const int col = lp.add_column(0.0, 0.0, 1.0);
      master.milp.integer_cols.push_back(col);
      master.milp.branch_priority.push_back(1);
    }
  } else {
    master.gamma_col = lp.add_column(0.0, 0.0, score_cap);
  }
  master.z_begin = lp.num_cols();
  for (int j = 0; j < inst.n_scenarios; ++j)
    lp.add_column(0.0, -score_cap, 0.0);

  // delta - gamma eps <= (1/N) sum z_j.
  {
    LinearProgram::Row row;
    row.sense = RowSense::kGe;
    row.rhs = inst.delta;
    for (int j = 0; j < inst.n_scenarios; ++j)
      row.coeffs.emplace_back(master.z_begin + j, 1.0 / inst.n_scenarios);
    if (master.gamma_col >= 0) {
      row.coeffs.emplace_back(master.gamma_col, inst.epsilon);
    } else {
      for (int k = 0; k < master.grid.size(); ++k)
        row.coeffs.emplace_back(master.gamma_bits_begin + k,
                                inst.epsilon * master.grid.values[k]);
    }
    lp.rows.push_back(std::move(row));
  }
  if (mode == SolveMode::kPlusCross) {
    LinearProgram::Row onehot;
    onehot.sense = RowSense::kEq;
    onehot.rhs = 1.0;
    for (int k = 0; k < master.grid.size(); ++k)
      onehot.coeffs.emplace_back(master.gamma_bits_begin + k, 1.0);
    lp.rows.push_back(std::move(onehot));
  }
  return master;
}

}  // namespace drcover

#endif  // DRCOVER_BNC_HPP_
