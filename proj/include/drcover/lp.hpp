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
// Bounded-variable primal simplex over a dense basis inverse. Designed for
// desk-scale master problems and oracle LPs: rows can be appended between
// solves (the inverse is extended in place), variable bounds can change
// between solves, and the basis is reused so that a re-solve after a small
// perturbation costs only a few pivots. Dantzig pricing with a Bland
// fallback after a pivot-count threshold guarantees termination.

#ifndef DRCOVER_LP_HPP_
#define DRCOVER_LP_HPP_

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drcover {

inline constexpr double kLpInfinity = 1e30;

enum class RowSense : char { kLe = 'L', kGe = 'G', kEq = 'E' };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kFailure: return "Failure";
  }
  return "?";
}

struct LinearProgram {
  bool maximize = false;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;

  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense = RowSense::kLe;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_column(double obj, double lo, double hi) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_cols() - 1;
  }

  void add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
    for (auto& [col, val] : coeffs) {
      if (col < 0 || col >= num_cols())
        throw std::invalid_argument("add_row: column index out of range");
      if (std::isnan(val)) throw std::invalid_argument("add_row: NaN coefficient");
    }
    rows.push_back(Row{std::move(coeffs), sense, rhs});
  }
};

enum class VarStatus : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeNb = 3 };

/// Opaque warm-start token: one status per column (structural then slacks).
struct LpBasis {
  std::vector<VarStatus> status;
};

struct LpOutcome {
  LpStatus status = LpStatus::kFailure;
  double objective = 0.0;
  std::vector<double> primal;  // structural columns
  std::vector<double> duals;   // one multiplier per row
  LpBasis basis;
  long iterations = 0;
};

/// Incremental simplex context. Construct from a LinearProgram, then
/// alternate set_bounds / add_row / solve. One context per thread.
class SimplexContext {
 public:
  explicit SimplexContext(const LinearProgram& lp) { init(lp); }

  int num_rows() const { return m_; }
  int num_structural() const { return ns_; }

  void set_bounds(int col, double lo, double hi) {
    lower_[col] = lo;
    upper_[col] = hi;
    if (vstat_[col] != VarStatus::kBasic) snap_nonbasic(col);
  }

  double lower_bound(int col) const { return lower_[col]; }
  double upper_bound(int col) const { return upper_[col]; }

  void set_objective(int col, double obj) { cost_[col] = obj; }

  /// Appends one row; its slack enters the basis and the inverse is extended.
  void add_row(const LinearProgram::Row& row) {
    const int r = m_;
    for (const auto& [col, val] : row.coeffs) {
      if (col < 0 || col >= ns_) throw std::invalid_argument("add_row: bad column");
      col_entries_[col].emplace_back(r, val);
    }
    row_coeffs_.push_back(row.coeffs);
    rhs_.push_back(row.rhs);
    // Slack bounds encode the sense of  a.x + s = rhs.
    double lo = 0.0, hi = 0.0;
    switch (row.sense) {
      case RowSense::kLe: lo = 0.0; hi = kLpInfinity; break;
      case RowSense::kGe: lo = -kLpInfinity; hi = 0.0; break;
      case RowSense::kEq: lo = 0.0; hi = 0.0; break;
    }
    slack_lower_.push_back(lo);
    slack_upper_.push_back(hi);
    max_rhs_ = std::max(max_rhs_, std::fabs(row.rhs));
    ++m_;
    grow_inverse();
    // B_new = [[B, 0], [C, I]] with C the new row over the old basis columns,
    // so the new inverse row is [-C B^{-1}, 1].
    std::vector<double>& newrow = binv_scratch_;
    newrow.assign(m_, 0.0);
    for (const auto& [col, val] : row.coeffs) {
      const int pos = basis_pos_of_col(col);
      if (pos >= 0) {
        const double* src = binv_row(pos);
        for (int t = 0; t < m_ - 1; ++t) newrow[t] -= val * src[t];
      }
    }
    newrow[m_ - 1] = 1.0;
    std::copy(newrow.begin(), newrow.end(), binv_row(m_ - 1));
    basic_col_.push_back(slack_col(r));
    if (!basis_pos_.empty()) basis_pos_.push_back(m_ - 1);
    vstat_.push_back(VarStatus::kBasic);
    xval_.push_back(0.0);  // recomputed before pivoting
    lower_.push_back(lo);
    upper_.push_back(hi);
    cost_.push_back(0.0);
    basis_dirty_values_ = true;
  }

  LpOutcome solve() {
    LpOutcome out;
    out.primal.assign(ns_, 0.0);
    out.duals.assign(m_, 0.0);
    drift_checked_ = false;
    if (!refresh_inverse_if_needed()) {
      out.status = LpStatus::kFailure;
      return out;
    }
    recompute_basic_values();
    long iters = 0;
    const long bland_after = 5L * (m_ + num_cols()) + 500;
    const long max_iters = 200L * (m_ + num_cols()) + 20000;

    // Phase 1: drive bound infeasibility of basic variables to zero.
    for (;;) {
      if (iters > max_iters) { out.status = LpStatus::kFailure; return out; }
      if ((iters & 2047) == 2047) {
        if (!refactorize()) { out.status = LpStatus::kFailure; return out; }
        recompute_basic_values();
      }
      if (total_infeasibility() <= kFeasTol * (1.0 + std::fabs(max_rhs_))) break;
      if (!phase1_step(iters > bland_after)) {
        // No improving direction: refresh once in case of drift, then decide.
        if (!drift_checked_) {
          drift_checked_ = true;
          if (!refactorize()) { out.status = LpStatus::kFailure; return out; }
          recompute_basic_values();
          continue;
        }
        out.status = LpStatus::kInfeasible;
        out.iterations = iters;
        drift_checked_ = false;
        return out;
      }
      ++iters;
      if ((iters & 63) == 0) recompute_basic_values();
    }
    drift_checked_ = false;

    // Phase 2: optimize the true objective from a feasible basis.
    for (;;) {
      if (iters > max_iters) { out.status = LpStatus::kFailure; return out; }
      if ((iters & 2047) == 2047) {
        if (!refactorize()) { out.status = LpStatus::kFailure; return out; }
        recompute_basic_values();
      }
      const int step = phase2_step(iters > bland_after);
      if (step == kStepOptimal) break;
      if (step == kStepUnbounded) {
        out.status = LpStatus::kUnbounded;
        out.iterations = iters;
        return out;
      }
      ++iters;
      if ((iters & 63) == 0) recompute_basic_values();
    }

    recompute_basic_values();
    if (total_infeasibility() > 1e-6 * (1.0 + std::fabs(max_rhs_))) {
      // Accumulated drift; refactorize and re-run once.
      if (!refactorize()) { out.status = LpStatus::kFailure; return out; }
      recompute_basic_values();
      if (total_infeasibility() > 1e-6 * (1.0 + std::fabs(max_rhs_))) {
        out.status = LpStatus::kFailure;
        return out;
      }
    }
    out.status = LpStatus::kOptimal;
    out.iterations = iters;
    for (int j = 0; j < ns_; ++j) out.primal[j] = xval_[j];
    compute_duals(cost_, out.duals);
    // Multipliers are reported for the problem as stated, not the internal
    // minimization form.
    if (sense_ < 0)
      for (double& y : out.duals) y = -y;
    double obj = 0.0;
    for (int j = 0; j < ns_; ++j) obj += cost_[j] * xval_[j];
    out.objective = sense_ * obj;
    out.basis.status = vstat_;
    return out;
  }

  LpBasis basis() const { return LpBasis{vstat_}; }

  /// Installs a warm basis; falls back to the slack basis if it is unusable.
  void set_basis(const LpBasis& basis) {
    if (static_cast<int>(basis.status.size()) != num_cols()) return;
    vstat_ = basis.status;
    rebuild_basic_list();
    if (!refactorize()) reset_to_slack_basis();
  }

  void reset_to_slack_basis() {
    for (int j = 0; j < num_cols(); ++j) vstat_[j] = nonbasic_status(j);
    for (int r = 0; r < m_; ++r) vstat_[slack_col(r)] = VarStatus::kBasic;
    rebuild_basic_list();
    binv_identity();
    for (int j = 0; j < num_cols(); ++j)
      if (vstat_[j] != VarStatus::kBasic) snap_nonbasic(j);
    basis_dirty_values_ = true;
    needs_refactor_ = false;
  }

  /// LP-file-style dump for debugging; format is non-normative.
  std::string dump() const {
    std::ostringstream os;
    os << "min ";
    for (int j = 0; j < ns_; ++j)
      if (cost_[j] != 0.0) os << (cost_[j] > 0 ? "+" : "") << cost_[j] << " x" << j << " ";
    os << "\nsubject to\n";
    for (int r = 0; r < m_; ++r) {
      os << " r" << r << ": ";
      for (const auto& [col, val] : row_coeffs_[r])
        os << (val > 0 ? "+" : "") << val << " x" << col << " ";
      const char* rel = slack_upper_[r] >= kLpInfinity   ? "<="
                        : slack_lower_[r] <= -kLpInfinity ? ">="
                                                          : "=";
      os << rel << " " << rhs_[r] << "\n";
    }
    os << "bounds\n";
    for (int j = 0; j < ns_; ++j)
      os << " " << lower_[j] << " <= x" << j << " <= " << upper_[j] << "\n";
    return os.str();
  }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr int kStepPivoted = 0;
  static constexpr int kStepOptimal = 1;
  static constexpr int kStepUnbounded = 2;

  int ns_ = 0;  // structural columns
  int m_ = 0;   // rows
  double sense_ = 1.0;
  double max_rhs_ = 1.0;
  bool basis_dirty_values_ = true;
  bool needs_refactor_ = false;
  bool drift_checked_ = false;

  std::vector<std::vector<std::pair<int, double>>> col_entries_;  // structural
  std::vector<std::vector<std::pair<int, double>>> row_coeffs_;
  std::vector<double> rhs_, slack_lower_, slack_upper_;
  std::vector<double> cost_, lower_, upper_, xval_;
  std::vector<VarStatus> vstat_;
  std::vector<int> basic_col_;   // column basic in each row position
  std::vector<int> basis_pos_;   // column -> basis position or -1
  std::vector<double> binv_;     // dense m x m, row-major with stride cap_
  int cap_ = 0;
  std::vector<double> binv_scratch_, work_y_, work_w_, work_d_;

  int num_cols() const { return ns_ + m_; }
  int slack_col(int r) const { return ns_ + r; }
  double* binv_row(int i) { return binv_.data() + static_cast<std::size_t>(i) * cap_; }
  const double* binv_row(int i) const {
    return binv_.data() + static_cast<std::size_t>(i) * cap_;
  }

  void init(const LinearProgram& lp) {
    ns_ = lp.num_cols();
    sense_ = lp.maximize ? -1.0 : 1.0;
    cost_.assign(lp.objective.begin(), lp.objective.end());
    if (lp.maximize)
      for (auto& c : cost_) c = -c;
    lower_ = lp.lower;
    upper_ = lp.upper;
    for (int j = 0; j < ns_; ++j) {
      if (std::isnan(cost_[j]) || lower_[j] > upper_[j] + 1e-12)
        throw std::invalid_argument("inconsistent column data");
    }
    col_entries_.resize(ns_);
    xval_.assign(ns_, 0.0);
    vstat_.assign(ns_, VarStatus::kAtLower);
    basis_pos_.clear();
    m_ = 0;
    cap_ = 16;
    binv_.assign(static_cast<std::size_t>(cap_) * cap_, 0.0);
    for (const auto& row : lp.rows) add_row(row);
    for (int j = 0; j < ns_; ++j) {
      vstat_[j] = nonbasic_status(j);
      snap_nonbasic(j);
    }
    for (const double b : rhs_) max_rhs_ = std::max(max_rhs_, std::fabs(b));
    rebuild_basic_list();
  }

  VarStatus nonbasic_status(int j) const {
    if (lower_[j] > -kLpInfinity) return VarStatus::kAtLower;
    if (upper_[j] < kLpInfinity) return VarStatus::kAtUpper;
    return VarStatus::kFreeNb;
  }

  void snap_nonbasic(int j) {
    switch (vstat_[j]) {
      case VarStatus::kAtLower:
        if (lower_[j] <= -kLpInfinity) { vstat_[j] = nonbasic_status(j); snap_nonbasic(j); return; }
        xval_[j] = lower_[j];
        break;
      case VarStatus::kAtUpper:
        if (upper_[j] >= kLpInfinity) { vstat_[j] = nonbasic_status(j); snap_nonbasic(j); return; }
        xval_[j] = upper_[j];
        break;
      case VarStatus::kFreeNb:
        xval_[j] = 0.0;
        break;
      case VarStatus::kBasic:
        break;
    }
    basis_dirty_values_ = true;
  }

  void rebuild_basic_list() {
    basic_col_.assign(m_, -1);
    basis_pos_.assign(num_cols(), -1);
    int pos = 0;
    for (int j = 0; j < num_cols(); ++j) {
      if (vstat_[j] != VarStatus::kBasic) continue;
      if (pos < m_) {
        basic_col_[pos] = j;
        basis_pos_[j] = pos;
        ++pos;
      } else {
        // Overfull warm basis: demote the surplus.
        vstat_[j] = nonbasic_status(j);
        snap_nonbasic(j);
      }
    }
    // Underfull basis: complete with slacks of uncovered rows.
    for (int r = 0; r < m_ && pos < m_; ++r) {
      const int sc = slack_col(r);
      if (basis_pos_[sc] < 0) {
        vstat_[sc] = VarStatus::kBasic;
        basic_col_[pos] = sc;
        basis_pos_[sc] = pos;
        ++pos;
      }
    }
    basis_dirty_values_ = true;
  }

  int basis_pos_of_col(int col) const {
    return col < static_cast<int>(basis_pos_.size()) ? basis_pos_[col] : -1;
  }

  void grow_inverse() {
    if (m_ <= cap_) return;
    const int new_cap = std::max(cap_ * 2, m_);
    std::vector<double> nb(static_cast<std::size_t>(new_cap) * new_cap, 0.0);
    for (int i = 0; i < m_ - 1; ++i)
      std::copy(binv_row(i), binv_row(i) + (m_ - 1),
                nb.begin() + static_cast<std::size_t>(i) * new_cap);
    binv_ = std::move(nb);
    cap_ = new_cap;
  }

  void binv_identity() {
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m_; ++i) binv_row(i)[i] = 1.0;
  }

  // Column j of the constraint matrix (structural coefficients or slack unit).
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < ns_) {
      for (const auto& [r, v] : col_entries_[j]) f(r, v);
    } else {
      f(j - ns_, 1.0);
    }
  }

  /// Rebuilds the dense inverse from the current basis with Gauss-Jordan and
  /// partial pivoting; dependent columns are swapped out for row slacks.
  bool refactorize() {
    if (m_ == 0) return true;
    // aug = [Bcols | I], reduce Bcols to I.
    const int w = 2 * m_;
    std::vector<double> aug(static_cast<std::size_t>(m_) * w, 0.0);
    auto at = [&](int i, int j) -> double& { return aug[static_cast<std::size_t>(i) * w + j]; };
    for (int p = 0; p < m_; ++p)
      for_col(basic_col_[p], [&](int r, double v) { at(r, p) += v; });
    for (int i = 0; i < m_; ++i) at(i, m_ + i) = 1.0;
    std::vector<int> pivoted_row(m_, -1);
    std::vector<char> row_used(m_, 0);
    for (int p = 0; p < m_; ++p) {
      int best = -1;
      double best_abs = 1e-10;
      for (int i = 0; i < m_; ++i)
        if (!row_used[i] && std::fabs(at(i, p)) > best_abs) {
          best_abs = std::fabs(at(i, p));
          best = i;
        }
      if (best < 0) {
        // Dependent basis column: replace with the slack of an unused row.
        int freerow = -1;
        for (int i = 0; i < m_; ++i)
          if (!row_used[i]) { freerow = i; break; }
        if (freerow < 0) return false;
        const int old = basic_col_[p];
        vstat_[old] = nonbasic_status(old);
        snap_nonbasic(old);
        basis_pos_[old] = -1;
        int sc = slack_col(freerow);
        if (vstat_[sc] == VarStatus::kBasic) return false;
        vstat_[sc] = VarStatus::kBasic;
        basic_col_[p] = sc;
        basis_pos_[sc] = p;
        for (int i = 0; i < m_; ++i) at(i, p) = 0.0;
        at(freerow, p) = 1.0;
        best = freerow;
      }
      row_used[best] = 1;
      pivoted_row[p] = best;
      const double piv = at(best, p);
      for (int j = 0; j < w; ++j) at(best, j) /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == best) continue;
        const double f = at(i, p);
        if (f == 0.0) continue;
        for (int j = p; j < w; ++j) at(i, j) -= f * at(best, j);
      }
    }
    // After reduction, row pivoted_row[p] holds e_p; B^{-1} row p = that row's
    // right half.
    for (int p = 0; p < m_; ++p) {
      double* dst = binv_row(p);
      const int src = pivoted_row[p];
      for (int j = 0; j < m_; ++j) dst[j] = at(src, m_ + j);
    }
    needs_refactor_ = false;
    basis_dirty_values_ = true;
    return true;
  }

  bool refresh_inverse_if_needed() {
    if (needs_refactor_) return refactorize();
    return true;
  }

  void recompute_basic_values() {
    // beta = rhs - sum over nonbasic columns of a_j x_j, then x_B = B^{-1} beta.
    std::vector<double>& beta = binv_scratch_;
    beta.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) beta[r] = rhs_[r];
    for (int j = 0; j < num_cols(); ++j) {
      if (vstat_[j] == VarStatus::kBasic) continue;
      const double xj = xval_[j];
      if (xj == 0.0) continue;
      for_col(j, [&](int r, double v) { beta[r] -= v * xj; });
    }
    for (int p = 0; p < m_; ++p) {
      const double* row = binv_row(p);
      double acc = 0.0;
      for (int r = 0; r < m_; ++r) acc += row[r] * beta[r];
      xval_[basic_col_[p]] = acc;
    }
    basis_dirty_values_ = false;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int p = 0; p < m_; ++p) {
      const int j = basic_col_[p];
      if (xval_[j] < lower_[j]) s += lower_[j] - xval_[j];
      if (xval_[j] > upper_[j]) s += xval_[j] - upper_[j];
    }
    return s;
  }

  void compute_duals(const std::vector<double>& c, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      const double cb = c[basic_col_[p]];
      if (cb == 0.0) continue;
      const double* row = binv_row(p);
      for (int r = 0; r < m_; ++r) y[r] += cb * row[r];
    }
  }

  double reduced_cost(const std::vector<double>& c, const std::vector<double>& y,
                      int j) const {
    double d = c[j];
    for_col(j, [&](int r, double v) { d -= y[r] * v; });
    return d;
  }

  void compute_direction(int q, std::vector<double>& w) const {
    // w = B^{-1} a_q over the sparse column, row-major friendly.
    if (q < ns_) {
      const auto& entries = col_entries_[q];
      w.assign(m_, 0.0);
      for (int p = 0; p < m_; ++p) {
        const double* row = binv_row(p);
        double acc = 0.0;
        for (const auto& [r, v] : entries) acc += row[r] * v;
        w[p] = acc;
      }
    } else {
      const int r = q - ns_;
      w.resize(m_);
      for (int p = 0; p < m_; ++p) w[p] = binv_row(p)[r];
    }
  }

  // Replaces the basic variable at position pos by column q; eta update of the
  // dense inverse in O(m^2).
  void pivot(int pos, int q, const std::vector<double>& w) {
    const int leaving = basic_col_[pos];
    basis_pos_[leaving] = -1;
    basic_col_[pos] = q;
    basis_pos_[q] = pos;
    vstat_[q] = VarStatus::kBasic;
    const double piv = w[pos];
    double* prow = binv_row(pos);
    for (int r = 0; r < m_; ++r) prow[r] /= piv;
    for (int p = 0; p < m_; ++p) {
      if (p == pos) continue;
      const double f = w[p];
      if (std::fabs(f) < 1e-14) continue;
      double* row = binv_row(p);
      for (int r = 0; r < m_; ++r) row[r] -= f * prow[r];
    }
  }

  struct Ratio {
    double t = std::numeric_limits<double>::infinity();
    int pos = -1;          // leaving basis position, -1 = entering bound flip
    bool to_upper = false; // leaving variable lands on its upper bound
  };

  // dir = +1 when the entering variable increases.
  Ratio ratio_test(int q, double dir, const std::vector<double>& w, bool bland,
                   bool phase1) const {
    Ratio best;
    // Entering variable's own travel limit (a bound flip, no pivot).
    if (dir > 0 && upper_[q] < kLpInfinity) best.t = upper_[q] - xval_[q];
    if (dir < 0 && lower_[q] > -kLpInfinity) best.t = xval_[q] - lower_[q];
    for (int p = 0; p < m_; ++p) {
      const int j = basic_col_[p];
      const double delta = -dir * w[p];  // d x_Bj / dt
      if (std::fabs(delta) < kPivotTol) continue;
      double limit;
      bool to_upper = false;
      const double xj = xval_[j];
      if (phase1 && xj < lower_[j] - kFeasTol) {
        // Infeasible below: leaves when climbing back to its lower bound.
        if (delta > 0) limit = (lower_[j] - xj) / delta;
        else continue;
      } else if (phase1 && xj > upper_[j] + kFeasTol) {
        if (delta < 0) { limit = (upper_[j] - xj) / delta; to_upper = true; }
        else continue;
      } else if (delta > 0) {
        if (upper_[j] >= kLpInfinity) continue;
        limit = (upper_[j] - xj) / delta;
        to_upper = true;
      } else {
        if (lower_[j] <= -kLpInfinity) continue;
        limit = (lower_[j] - xj) / delta;
      }
      if (limit < 0.0) limit = 0.0;
      bool take = false;
      if (limit < best.t - 1e-12) {
        take = true;
      } else if (limit < best.t + 1e-12 && best.pos >= 0) {
        // Tie between basic leavers: Bland picks the smallest variable,
        // otherwise prefer the numerically larger pivot element.
        take = bland ? j < basic_col_[best.pos]
                     : std::fabs(w[p]) > std::fabs(w[best.pos]) + 1e-12;
      }
      // Tie against the entering bound flip keeps the flip (cheaper).
      if (take) {
        best.t = limit;
        best.pos = p;
        best.to_upper = to_upper;
      }
    }
    return best;
  }

  void apply_step(int q, double dir, double t, const std::vector<double>& w) {
    if (t != 0.0) {
      for (int p = 0; p < m_; ++p) xval_[basic_col_[p]] += -dir * w[p] * t;
      xval_[q] += dir * t;
    }
  }

  bool phase1_step(bool bland) {
    std::vector<double>& c1 = work_d_;
    c1.assign(num_cols(), 0.0);
    for (int p = 0; p < m_; ++p) {
      const int j = basic_col_[p];
      if (xval_[j] < lower_[j] - kFeasTol) c1[j] = -1.0;
      else if (xval_[j] > upper_[j] + kFeasTol) c1[j] = 1.0;
    }
    std::vector<double>& y = work_y_;
    compute_duals(c1, y);
    int q = -1;
    double qdir = 0.0, best_score = kDualTol;
    for (int j = 0; j < num_cols(); ++j) {
      if (vstat_[j] == VarStatus::kBasic) continue;
      if (lower_[j] == upper_[j]) continue;
      const double d = reduced_cost(c1, y, j);
      double score = 0.0, dir = 0.0;
      if ((vstat_[j] == VarStatus::kAtLower || vstat_[j] == VarStatus::kFreeNb) &&
          d < -kDualTol) {
        score = -d;
        dir = 1.0;
      } else if ((vstat_[j] == VarStatus::kAtUpper || vstat_[j] == VarStatus::kFreeNb) &&
                 d > kDualTol) {
        score = d;
        dir = -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) { q = j; qdir = dir; break; }
      if (score > best_score) { best_score = score; q = j; qdir = dir; }
    }
    if (q < 0) return false;
    std::vector<double>& w = work_w_;
    compute_direction(q, w);
    Ratio r = ratio_test(q, qdir, w, bland, /*phase1=*/true);
    if (!std::isfinite(r.t)) {
      // The phase-1 objective is bounded below by zero, so an unbounded ray
      // still reduces infeasibility; walk to the last useful breakpoint.
      // This only happens with free variables; treat as failure-safe stop.
      return false;
    }
    apply_step(q, qdir, r.t, w);
    if (r.pos < 0) {
      vstat_[q] = (qdir > 0) ? VarStatus::kAtUpper : VarStatus::kAtLower;
      xval_[q] = (qdir > 0) ? upper_[q] : lower_[q];
    } else {
      const int leaving = basic_col_[r.pos];
      pivot(r.pos, q, w);
      vstat_[leaving] = r.to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      xval_[leaving] = r.to_upper ? upper_[leaving] : lower_[leaving];
    }
    return true;
  }

  int phase2_step(bool bland) {
    std::vector<double>& y = work_y_;
    compute_duals(cost_, y);
    int q = -1;
    double qdir = 0.0, best_score = kDualTol;
    for (int j = 0; j < num_cols(); ++j) {
      if (vstat_[j] == VarStatus::kBasic) continue;
      if (lower_[j] == upper_[j]) continue;
      const double d = reduced_cost(cost_, y, j);
      double score = 0.0, dir = 0.0;
      if ((vstat_[j] == VarStatus::kAtLower || vstat_[j] == VarStatus::kFreeNb) &&
          d < -kDualTol) {
        score = -d;
        dir = 1.0;
      } else if ((vstat_[j] == VarStatus::kAtUpper || vstat_[j] == VarStatus::kFreeNb) &&
                 d > kDualTol) {
        score = d;
        dir = -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) { q = j; qdir = dir; break; }
      if (score > best_score) { best_score = score; q = j; qdir = dir; }
    }
    if (q < 0) return kStepOptimal;
    std::vector<double>& w = work_w_;
    compute_direction(q, w);
    Ratio r = ratio_test(q, qdir, w, bland, /*phase1=*/false);
    if (!std::isfinite(r.t)) return kStepUnbounded;
    apply_step(q, qdir, r.t, w);
    if (r.pos < 0) {
      vstat_[q] = (qdir > 0) ? VarStatus::kAtUpper : VarStatus::kAtLower;
      xval_[q] = (qdir > 0) ? upper_[q] : lower_[q];
    } else {
      const int leaving = basic_col_[r.pos];
      pivot(r.pos, q, w);
      vstat_[leaving] = r.to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      xval_[leaving] = r.to_upper ? upper_[leaving] : lower_[leaving];
    }
    return kStepPivoted;
  }
};

/// One-shot solve with an optional warm basis.
inline LpOutcome solve_lp(const LinearProgram& lp, const LpBasis* warm = nullptr) {
  SimplexContext ctx(lp);
  if (warm != nullptr) ctx.set_basis(*warm);
  return ctx.solve();
}

}  // namespace drcover

#endif  // DRCOVER_LP_HPP_
