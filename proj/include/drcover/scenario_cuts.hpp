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
// Per-scenario machinery: the linearized continuous-knapsack value of the
// coverage score, its closed-form dual, extended polymatroid separation for
// submodular functions, and the Benders feasibility cut built from them.

#ifndef DRCOVER_SCENARIO_CUTS_HPP_
#define DRCOVER_SCENARIO_CUTS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "drcover/linear_cut.hpp"
#include "drcover/model.hpp"
#include "drcover/risk.hpp"

namespace drcover {

/// c_p[k-1] = fbar(k+1-v_m) - fbar(k-v_m) for k in [n]: the increment vector
/// of the concave extension, strictly positive and nonincreasing.
inline std::vector<double> cp_vector(int v_m, double p, int n) {
  std::vector<double> cp(n);
  for (int k = 1; k <= n; ++k)
    cp[k - 1] = fbar(k + 1 - v_m, p) - fbar(k - v_m, p);
  return cp;
}

/// min_i (x . xi_i - v_i + v_m) and the smallest index attaining it.
struct ShiftedCapacity {
  long long v_bar = 0;
  int i_star = 0;
};

inline ShiftedCapacity shifted_capacity(std::span<const int> x, const Instance& inst,
                                        int j) {
  const int v_m = inst.max_coverage();
  ShiftedCapacity out;
  long long best = std::numeric_limits<long long>::max();
  for (int i = 0; i < inst.n_targets; ++i) {
    auto row = inst.scenario_row(j, i);
    long long dot = 0;
    for (int k = 0; k < inst.n_elements; ++k) dot += static_cast<long long>(x[k]) * row[k];
    const long long cap = dot - inst.coverage[i] + v_m;
    if (cap < best) {
      best = cap;
      out.i_star = i;
    }
  }
  out.v_bar = best;
  return out;
}

/// Optimal value of the linearized knapsack: fbar(v_bar + 1 - v_m), which
/// equals fbar of the scenario's tightest margin.
inline double knapsack_value(std::span<const int> x, const Instance& inst, int j) {
  const auto cap = shifted_capacity(x, inst, j);
  return fbar(cap.v_bar + 1 - inst.max_coverage(), inst.p);
}

/// Closed-form dual of the knapsack subproblem.
///
/// mu1 = -e_{i*} (c_p)_{v*} with v* = clamp(v_bar, 1, n), and
/// (mu2)_k = min(-(c_p)_k - mu1_sum, 0). `objective` holds the optimum of the
/// dual of the maximization form, i.e. fbar(v_bar + 1 - v_m) by strong
/// duality; the two-stage subproblem value is its negation.
struct DualSolution {
  double mu1_sum = 0.0;  // 1^T mu1 <= 0
  int i_star = 0;
  std::vector<double> mu2;
  double objective = 0.0;
};

inline DualSolution dual_solution(std::span<const int> x, const Instance& inst, int j) {
  const int n = inst.n_elements;
  const int v_m = inst.max_coverage();
  const auto cp = cp_vector(v_m, inst.p, n);
  const auto cap = shifted_capacity(x, inst, j);
  const long long v_star = std::clamp<long long>(cap.v_bar, 1, n);
  DualSolution out;
  out.i_star = cap.i_star;
  out.mu1_sum = -cp[v_star - 1];
  out.mu2.resize(n);
  for (int k = 0; k < n; ++k) out.mu2[k] = std::min(-cp[k] - out.mu1_sum, 0.0);
  out.objective = fbar(cap.v_bar + 1 - v_m, inst.p);
  return out;
}

/// Result of separating the epigraph of a submodular set function at a point:
/// the inequality  constant + sum_k increments[k] x_{sigma[k]} <= theta.
struct EpiData {
  std::vector<int> sigma;
  std::vector<double> increments;  // phi(T_k) - phi(T_{k-1})
  double constant = 0.0;           // phi(empty)
};

/// Permutation sorting x_hat descending, ties by lowest index.
inline std::vector<int> descending_order(std::span<const double> x_hat) {
  std::vector<int> sigma(x_hat.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  std::stable_sort(sigma.begin(), sigma.end(),
                   [&](int a, int b) { return x_hat[a] > x_hat[b]; });
  return sigma;
}

/// Generic separation: phi receives the indicator of the prefix set T_k.
/// The caller guarantees submodularity.
inline EpiData epi_separate(const std::function<double(const std::vector<int>&)>& phi,
                            std::span<const double> x_hat) {
  const int n = static_cast<int>(x_hat.size());
  EpiData out;
  out.sigma = descending_order(x_hat);
  out.increments.resize(n);
  std::vector<int> subset(n, 0);
  out.constant = phi(subset);
  double prev = out.constant;
  for (int k = 0; k < n; ++k) {
    subset[out.sigma[k]] = 1;
    const double cur = phi(subset);
    out.increments[k] = cur - prev;
    prev = cur;
  }
  return out;
}

/// Benders feasibility cut for scenario j at an integral candidate.
///
/// phi^j(x) = min{ mu1_sum (x . xi_{i*} - v_{i*} + v_m) + 1^T mu2
///                 - fbar(1 - v_m), 0 } is submodular; its extended
/// polymatroid inequality at the descending permutation yields
///   -z_j - gamma >= phi^j(empty) + sum_k [phi^j(T_k) - phi^j(T_{k-1})] x_{sigma_k},
/// evaluated incrementally in one pass. Returns the cut only when the
/// candidate violates the scenario's subproblem by more than `violation_tol`.
inline std::optional<LinearCut> benders_cut(std::span<const double> x_hat,
                                            double gamma_hat, double z_hat_j,
                                            const Instance& inst, int j,
                                            double violation_tol = 1e-6) {
  const int n = inst.n_elements;
  std::vector<int> xi(n);
  for (int k = 0; k < n; ++k) xi[k] = x_hat[k] >= 0.5 ? 1 : 0;
  const auto dual = dual_solution(xi, inst, j);
  const double q_min = std::min(-dual.objective, 0.0);
  if (-z_hat_j - gamma_hat >= q_min - violation_tol) return std::nullopt;

  const int v_m = inst.max_coverage();
  const double t = dual.mu1_sum;
  double mu2_sum = 0.0;
  for (double m : dual.mu2) mu2_sum += m;
  const double base = t * (-inst.coverage[dual.i_star] + v_m) + mu2_sum -
                      fbar(1 - v_m, inst.p);
  auto row = inst.scenario_row(j, dual.i_star);

  LinearCut cut;
  cut.family = CutFamily::kBenders;
  cut.scenario = j;
  cut.x_coeffs.assign(n, 0.0);
  cut.gamma_coeff = -1.0;
  cut.z_coeffs = {{j, -1.0}};
  const auto sigma = descending_order(x_hat);
  double prev = std::min(base, 0.0);
  cut.rhs = prev;
  cut.epi_slope = t;
  cut.epi_constant = prev;
  long long count = 0;
  for (int k = 0; k < n; ++k) {
    count += row[sigma[k]];
    const double cur = std::min(t * count + base, 0.0);
    cut.x_coeffs[sigma[k]] = -(cur - prev);
    prev = cur;
  }
  return cut;
}

}  // namespace drcover

#endif  // DRCOVER_SCENARIO_CUTS_HPP_
