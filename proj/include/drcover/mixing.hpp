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
// Cross-scenario machinery: the finite grid of values the CVaR auxiliary can
// take at optimality, base inequalities extracted from per-scenario cuts,
// the mixed inequality over a set of bases, and its lifting over the grid
// encoding binaries.

#ifndef DRCOVER_MIXING_HPP_
#define DRCOVER_MIXING_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "drcover/linear_cut.hpp"
#include "drcover/model.hpp"
#include "drcover/risk.hpp"

namespace drcover {

/// Admissible values of the CVaR auxiliary at optimality: r with r^p in [n],
/// bounded below by ceil((delta/eps)^p)^{1/p} and above by the empirical
/// quantile of the all-ones selection's scores. Empty means the instance is
/// infeasible.
struct GammaGrid {
  std::vector<double> values;      // ascending
  std::vector<long long> powers;   // values[k]^p, integers in [1, n]

  bool infeasible() const { return values.empty(); }
  int size() const { return static_cast<int>(values.size()); }
  double r1() const { return values.front(); }
};

inline GammaGrid gamma_grid(const Instance& inst) {
  GammaGrid grid;
  const int n = inst.n_elements;
  std::vector<int> ones(n, 1);
  auto sm = scenario_margins(ones, inst);
  std::vector<double> neg(sm.g.size());
  for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -sm.g[j];
  const double ub = -var_cvar(std::move(neg), inst.epsilon).var;
  const double ratio_pow = std::pow(inst.delta / inst.epsilon, inst.p);
  long long k_lo = static_cast<long long>(std::ceil(ratio_pow - 1e-9));
  if (k_lo < 1) k_lo = 1;
  const long long k_hi =
      std::min<long long>(n, static_cast<long long>(
                                 std::floor(std::pow(ub, inst.p) + 1e-9)));
  for (long long k = k_lo; k <= k_hi; ++k) {
    grid.powers.push_back(k);
    grid.values.push_back(std::pow(static_cast<double>(k), 1.0 / inst.p));
  }
  return grid;
}

/// One per-scenario linear relaxation -z_j - gamma >= d (x . xi_bar) + d0
/// with d < 0, extracted from an EPI-shaped cut.
struct BaseInequality {
  int scenario = -1;
  double d = 0.0;
  double d0 = 0.0;
  std::vector<std::uint8_t> xi_bar;
};

/// Aggregates an EPI-shaped cut into its base inequality: the support of
/// xi_bar is wherever the cut carries a negative increment, d is the full
/// slope and d0 the constant.
inline BaseInequality base_from_cut(const LinearCut& cut) {
  if (!(cut.epi_slope < 0.0) || cut.scenario < 0)
    throw std::invalid_argument("base_from_cut: cut not of EPI shape");
  BaseInequality base;
  base.scenario = cut.scenario;
  base.d = cut.epi_slope;
  base.d0 = cut.epi_constant;
  base.xi_bar.assign(cut.x_coeffs.size(), 0);
  for (std::size_t k = 0; k < cut.x_coeffs.size(); ++k) {
    const double increment = -cut.x_coeffs[k];
    if (increment > 1e-12 || increment < cut.epi_slope - 1e-9)
      throw std::invalid_argument("base_from_cut: cut not of EPI shape");
    if (increment < -1e-12) base.xi_bar[k] = 1;
  }
  return base;
}

/// tau = ceil(u) and nu = u - (tau - 1) for u = -(r + d0)/d; exact integers
/// snap to nu = 1 so that nu stays in (0, 1].
struct TauNu {
  double tau = 0.0;
  double nu = 0.0;
};

inline TauNu tau_nu(const BaseInequality& base, double r) {
  const double u = -(r + base.d0) / base.d;
  const double rounded = std::round(u);
  TauNu out;
  if (std::fabs(u - rounded) < 1e-9) {
    out.tau = rounded;
    out.nu = 1.0;
  } else {
    out.tau = std::ceil(u);
    out.nu = u - (out.tau - 1.0);
  }
  return out;
}

/// Mixed-inequality data at the grid minimum plus lifting coefficients.
struct MixedCutData {
  std::vector<int> order;     // base indices, nu1 ascending (index tie-break)
  std::vector<double> tau1;   // per base, aligned with the input list
  std::vector<double> nu1;
  std::vector<double> alpha;  // per grid slot, filled by lift_coefficients
};

inline MixedCutData mixed_inequality(std::span<const BaseInequality> bases,
                                     const GammaGrid& grid) {
  if (bases.empty()) throw std::invalid_argument("mixed_inequality: no bases");
  if (grid.infeasible()) throw std::invalid_argument("mixed_inequality: empty grid");
  MixedCutData data;
  const int J = static_cast<int>(bases.size());
  data.tau1.resize(J);
  data.nu1.resize(J);
  for (int j = 0; j < J; ++j) {
    const auto tn = tau_nu(bases[j], grid.r1());
    data.tau1[j] = tn.tau;
    data.nu1[j] = tn.nu;
  }
  data.order.resize(J);
  for (int j = 0; j < J; ++j) data.order[j] = j;
  std::stable_sort(data.order.begin(), data.order.end(),
                   [&](int a, int b) { return data.nu1[a] < data.nu1[b]; });
  return data;
}

/// Lifting coefficients over the grid encoding:
/// alpha_k = (min_j min{nu^j_k - nu^J_1, 0}
///            + sum_j (nu^j_1 - nu^{j-1}_1)(tau^j_k - tau^j_1))^+.
inline void lift_coefficients(std::span<const BaseInequality> bases,
                              const GammaGrid& grid, MixedCutData& data) {
  const int J = static_cast<int>(bases.size());
  const double nu_last = data.nu1[data.order.back()];
  data.alpha.assign(grid.size(), 0.0);
  for (int k = 0; k < grid.size(); ++k) {
    double min_term = 0.0;
    double sum_term = 0.0;
    double prev_nu = 0.0;
    for (int pos = 0; pos < J; ++pos) {
      const int j = data.order[pos];
      const auto tn = tau_nu(bases[j], grid.values[k]);
      min_term = std::min(min_term, tn.nu - nu_last);
      sum_term += (data.nu1[j] - prev_nu) * (tn.tau - data.tau1[j]);
      prev_nu = data.nu1[j];
    }
    data.alpha[k] = std::max(0.0, min_term + sum_term);
  }
  if (!data.alpha.empty()) data.alpha[0] = 0.0;  // the r1 slot
}

/// Right-hand side of the lifted inequality at a point.
inline double mixed_rhs_at(std::span<const BaseInequality> bases,
                           const MixedCutData& data,
                           std::span<const double> x_hat,
                           std::span<const double> gamma_bits_hat) {
  double rhs = 0.0;
  double prev_nu = 0.0;
  for (int j : data.order) {
    double dot = 0.0;
    for (std::size_t k = 0; k < bases[j].xi_bar.size(); ++k)
      dot += bases[j].xi_bar[k] ? x_hat[k] : 0.0;
    rhs += (data.nu1[j] - prev_nu) * (data.tau1[j] - dot);
    prev_nu = data.nu1[j];
  }
  for (std::size_t k = 0; k < data.alpha.size() && k < gamma_bits_hat.size(); ++k)
    rhs += data.alpha[k] * gamma_bits_hat[k];
  return rhs;
}

/// Greedy separation at an integral master point in the encoded mode.
///
/// Keeps one base per scenario (the one maximizing nu at r1), checks the
/// max-form lifted inequality and emits the aggregated sum form
///   sum_{j in J'} z_j/d^j >= sum (nu^j_1 - nu^{j-1}_1)(tau^j_1 - x.xi_bar^j)
///                            + sum_k alpha_k gamma_k
/// when that form is itself violated; each z_j/d^j >= 0 makes the sum
/// dominate the max, so the aggregate is valid whenever the max form is.
inline std::optional<LinearCut> separate_mixing(
    std::span<const double> x_hat, std::span<const double> z_hat,
    std::span<const double> gamma_bits_hat,
    std::span<const BaseInequality> pool, const GammaGrid& grid,
    double violation_tol = 1e-6) {
  if (pool.empty() || grid.infeasible()) return std::nullopt;
  // Per scenario, the base maximizing nu at r1 (earliest on ties).
  std::map<int, int> chosen;
  for (int idx = 0; idx < static_cast<int>(pool.size()); ++idx) {
    const double nu = tau_nu(pool[idx], grid.r1()).nu;
    auto it = chosen.find(pool[idx].scenario);
    if (it == chosen.end() || nu > tau_nu(pool[it->second], grid.r1()).nu + 1e-15)
      chosen[pool[idx].scenario] = idx;
  }
  std::vector<BaseInequality> bases;
  bases.reserve(chosen.size());
  for (const auto& [scen, idx] : chosen) bases.push_back(pool[idx]);

  auto data = mixed_inequality(bases, grid);
  lift_coefficients(bases, grid, data);
  const double rhs = mixed_rhs_at(bases, data, x_hat, gamma_bits_hat);
  double max_form = -std::numeric_limits<double>::infinity();
  double aggregate = 0.0;
  for (const auto& base : bases) {
    const double term = z_hat[base.scenario] / base.d;
    max_form = std::max(max_form, term);
    aggregate += term;
  }
  if (max_form >= rhs - violation_tol || aggregate >= rhs - violation_tol)
    return std::nullopt;

  LinearCut cut;
  cut.family = CutFamily::kMixing;
  cut.x_coeffs.assign(x_hat.size(), 0.0);
  cut.gamma_bit_coeffs.assign(grid.size(), 0.0);
  double prev_nu = 0.0;
  double rhs_const = 0.0;
  for (int j : data.order) {
    const double weight = data.nu1[j] - prev_nu;
    for (std::size_t k = 0; k < bases[j].xi_bar.size(); ++k)
      if (bases[j].xi_bar[k]) cut.x_coeffs[k] += weight;
    rhs_const += weight * data.tau1[j];
    prev_nu = data.nu1[j];
  }
  for (const auto& base : bases)
    cut.z_coeffs.emplace_back(base.scenario, 1.0 / base.d);
  std::sort(cut.z_coeffs.begin(), cut.z_coeffs.end());
  for (int k = 0; k < grid.size(); ++k) cut.gamma_bit_coeffs[k] = -data.alpha[k];
  cut.rhs = rhs_const;
  return cut;
}

}  // namespace drcover

#endif  // DRCOVER_MIXING_HPP_
