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
// Convex-hull cuts for the hypograph of a shifted concave coverage score
// theta <= f((x.xi - beta)^+): the L1/L2 surrogate families h_{(l,rho)},
// their extended polymatroid separation, and the per-scenario master cuts.

#ifndef DRCOVER_HULL_CUTS_HPP_
#define DRCOVER_HULL_CUTS_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "drcover/linear_cut.hpp"
#include "drcover/model.hpp"
#include "drcover/risk.hpp"
#include "drcover/scenario_cuts.hpp"

namespace drcover {

/// Piecewise-linear breakpoints of a strictly concave increasing f with
/// f(0) = 0: slopes a_l = f(l) - f(l-1) and intercepts b_l = f(l) - a_l l.
struct PiecewiseConcave {
  std::vector<double> a;
  std::vector<double> b;

  int size() const { return static_cast<int>(a.size()); }
  double f(int ell) const {
    if (ell <= 0) return 0.0;
    return a[ell - 1] * ell + b[ell - 1];
  }
  double ratio(int ell) const { return b[ell - 1] / a[ell - 1]; }
};

/// Breakpoints of f(z) = z^{1/p}; p = 1 makes f affine and the rho intervals
/// degenerate, so it is rejected here (callers fall back to plain cuts).
inline PiecewiseConcave breakpoints(double p, int n) {
  if (!(p > 1.0))
    throw std::invalid_argument("breakpoints: requires p > 1 (strict concavity)");
  PiecewiseConcave pw;
  pw.a.resize(n);
  pw.b.resize(n);
  double prev = 0.0;
  for (int ell = 1; ell <= n; ++ell) {
    const double cur = std::pow(static_cast<double>(ell), 1.0 / p);
    pw.a[ell - 1] = cur - prev;
    pw.b[ell - 1] = cur - pw.a[ell - 1] * ell;
    prev = cur;
  }
  return pw;
}

/// Breakpoints of a tabulated f(0..n) with f(0) = 0, strictly concave
/// increasing.
inline PiecewiseConcave breakpoints_from_values(std::span<const double> f_values) {
  const int n = static_cast<int>(f_values.size()) - 1;
  if (n < 1 || f_values[0] != 0.0)
    throw std::invalid_argument("breakpoints_from_values: need f(0)=0 and n>=1");
  PiecewiseConcave pw;
  pw.a.resize(n);
  pw.b.resize(n);
  for (int ell = 1; ell <= n; ++ell) {
    pw.a[ell - 1] = f_values[ell] - f_values[ell - 1];
    pw.b[ell - 1] = f_values[ell] - pw.a[ell - 1] * ell;
    if (pw.a[ell - 1] <= 0.0 ||
        (ell > 1 && pw.a[ell - 1] >= pw.a[ell - 2] - 1e-15))
      throw std::invalid_argument(
          "breakpoints_from_values: not strictly concave increasing");
  }
  return pw;
}

struct HullPair {
  int ell = 0;
  double rho = 0.0;
};

struct HullFamily {
  int z_size = 0;  // |Z|, the support size of xi
  int beta = 0;
  std::vector<int> support;  // indices with xi = 1, ascending
  std::vector<HullPair> l1;
  std::vector<HullPair> l2;
};

namespace internal {

// Family construction for any beta >= 0; empty when beta >= |Z| (the shifted
// score is identically zero on reachable points).
inline HullFamily make_family(std::span<const std::uint8_t> xi, int beta,
                              const PiecewiseConcave& pw) {
  HullFamily fam;
  fam.beta = beta;
  for (int k = 0; k < static_cast<int>(xi.size()); ++k)
    if (xi[k]) fam.support.push_back(k);
  fam.z_size = static_cast<int>(fam.support.size());
  if (beta >= fam.z_size) return fam;
  const int last = fam.z_size - beta;  // L = [|Z| - beta]
  for (int ell = 1; ell <= last; ++ell) {
    fam.l1.push_back({ell, pw.ratio(ell)});
    if (beta >= 1 && ell + 1 <= pw.size()) {
      const double lo = pw.ratio(ell), hi = pw.ratio(ell + 1);
      // Open interval with an exact guard on the rational endpoints.
      const int first_int = static_cast<int>(std::floor(lo + 1e-12)) + 1;
      for (int rho = std::max(1, first_int); rho <= beta; ++rho) {
        if (rho <= lo + 1e-12) continue;
        if (rho >= hi - 1e-12) break;
        fam.l2.push_back({ell, static_cast<double>(rho)});
      }
    }
  }
  return fam;
}

}  // namespace internal

/// Spec'd construction: the nontrivial regime 1 <= beta <= |Z| - 2.
inline HullFamily build_family(std::span<const std::uint8_t> xi, int beta,
                               const PiecewiseConcave& pw) {
  int z_size = 0;
  for (auto e : xi) z_size += e ? 1 : 0;
  if (beta < 1 || beta > z_size - 2)
    throw std::invalid_argument("build_family: beta out of [1, |Z|-2]");
  return internal::make_family(xi, beta, pw);
}

/// h_{(l,rho)}(z) = ((f(l)/(l+rho)) (z - (beta - rho)))^+.
inline double h_value(const HullPair& pair, long long z, int beta,
                      const PiecewiseConcave& pw) {
  const double slope = pw.f(pair.ell) / (pair.ell + pair.rho);
  return std::max(0.0, slope * (static_cast<double>(z) - (beta - pair.rho)));
}

/// One surrogate-hypograph cut in (theta, x) space:
/// theta <= constant + sum_k x_coeffs[k] x_k.
struct HullSeparationCut {
  HullPair pair;
  double constant = 0.0;
  std::vector<double> x_coeffs;
  double violation = 0.0;
};

/// Separates (theta_hat, x_hat) from the intersection of the surrogate hulls:
/// one descending sort of x_hat, then one extended polymatroid inequality per
/// (l,rho) pair (at most |Z| checks). Returns the most violated cut.
inline std::optional<HullSeparationCut> separate_hull(
    double theta_hat, std::span<const double> x_hat,
    std::span<const std::uint8_t> xi, int beta, const PiecewiseConcave& pw,
    double violation_tol = 1e-6) {
  const auto fam = internal::make_family(xi, beta, pw);
  if (fam.l1.empty() && fam.l2.empty()) return std::nullopt;
  const int n = static_cast<int>(x_hat.size());
  // Descending order of x_hat restricted to the support, lowest index first.
  std::vector<int> order = fam.support;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x_hat[a] > x_hat[b]; });

  std::optional<HullSeparationCut> best;
  auto consider = [&](const HullPair& pair) {
    const double slope = pw.f(pair.ell) / (pair.ell + pair.rho);
    // phi(x) = -h(x.xi) = slope * min(beta - rho - x.xi, 0), submodular.
    double prev = slope * std::min(static_cast<double>(beta) - pair.rho, 0.0);
    HullSeparationCut cut;
    cut.pair = pair;
    cut.constant = -prev;
    cut.x_coeffs.assign(n, 0.0);
    double rhs_at_point = cut.constant;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double cur =
          slope * std::min(static_cast<double>(beta) - pair.rho -
                               static_cast<double>(k + 1),
                           0.0);
      cut.x_coeffs[order[k]] = -(cur - prev);
      rhs_at_point += cut.x_coeffs[order[k]] * x_hat[order[k]];
      prev = cur;
    }
    cut.violation = theta_hat - rhs_at_point;
    if (cut.violation > violation_tol &&
        (!best || cut.violation > best->violation))
      best = std::move(cut);
  };
  for (const auto& pair : fam.l1) consider(pair);
  for (const auto& pair : fam.l2) consider(pair);
  return best;
}

/// All violated surrogate cuts for scenario j's binding target, in master
/// space: -z_j - gamma >= Phi(empty) + sum_k [Phi(T_k) - Phi(T_{k-1})] x_{sigma_k}
/// with Phi(x) = (l^{1/p}/(l+rho)) min{-x.xi + v_{i*} - 1 - rho, 0}.
/// With max_cuts > 0 only the most violated are kept.
inline std::vector<LinearCut> single_scenario_cut(
    std::span<const double> x_hat, double gamma_hat, double z_hat_j,
    const Instance& inst, int j, int i_star, double violation_tol = 1e-6,
    int max_cuts = 0) {
  std::vector<LinearCut> out;
  if (!(inst.p > 1.0)) return out;  // affine score: Benders cuts suffice
  const int n = inst.n_elements;
  const int beta = inst.coverage[i_star] - 1;
  auto xi = inst.scenario_row(j, i_star);
  const double lhs = -z_hat_j - gamma_hat;

  int z_size = 0;
  for (auto e : xi) z_size += e ? 1 : 0;
  if (beta >= z_size) {
    // The score is identically zero on this target: theta <= 0.
    if (lhs < -violation_tol) {
      LinearCut cut;
      cut.family = CutFamily::kHull;
      cut.scenario = j;
      cut.x_coeffs.assign(n, 0.0);
      cut.gamma_coeff = -1.0;
      cut.z_coeffs = {{j, -1.0}};
      cut.rhs = 0.0;
      cut.epi_slope = 0.0;
      cut.epi_constant = 0.0;
      out.push_back(std::move(cut));
    }
    return out;
  }

  const auto pw = breakpoints(inst.p, n);
  const auto fam = internal::make_family(xi, beta, pw);
  std::vector<int> order = fam.support;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x_hat[a] > x_hat[b]; });

  std::vector<std::pair<double, LinearCut>> violated;
  auto consider = [&](const HullPair& pair) {
    const double slope = pw.f(pair.ell) / (pair.ell + pair.rho);
    double prev = slope * std::min(static_cast<double>(beta) - pair.rho, 0.0);
    LinearCut cut;
    cut.family = CutFamily::kHull;
    cut.scenario = j;
    cut.x_coeffs.assign(n, 0.0);
    cut.gamma_coeff = -1.0;
    cut.z_coeffs = {{j, -1.0}};
    cut.rhs = prev;
    cut.epi_slope = -slope;
    cut.epi_constant = prev;
    double epi_at_point = prev;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double cur =
          slope * std::min(static_cast<double>(beta) - pair.rho -
                               static_cast<double>(k + 1),
                           0.0);
      cut.x_coeffs[order[k]] = -(cur - prev);
      epi_at_point += (cur - prev) * x_hat[order[k]];
      prev = cur;
    }
    const double violation = epi_at_point - lhs;
    if (violation > violation_tol) violated.emplace_back(violation, std::move(cut));
  };
  for (const auto& pair : fam.l1) consider(pair);
  for (const auto& pair : fam.l2) consider(pair);

  if (max_cuts > 0 && static_cast<int>(violated.size()) > max_cuts) {
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    violated.resize(max_cuts);
  }
  out.reserve(violated.size());
  for (auto& [v, cut] : violated) out.push_back(std::move(cut));
  return out;
}

}  // namespace drcover

#endif  // DRCOVER_HULL_CUTS_HPP_
