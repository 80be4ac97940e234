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

#ifndef DRCOVER_RISK_HPP_
#define DRCOVER_RISK_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "drcover/model.hpp"

namespace drcover {

/// Concave increasing extension of z^{1/p} from nonnegative to all integers:
/// fbar(z) = z^{1/p} for z >= 0 and fbar(z) = z for z <= -1.
inline double fbar(long long z, double p) {
  if (z >= 0) return std::pow(static_cast<double>(z), 1.0 / p);
  return static_cast<double>(z);
}

/// Per-scenario shifted margins and their scores.
struct ScenarioMargins {
  std::vector<long long> margin;  // min_i (x . xi_i - v_i + 1), may be negative
  std::vector<double> g;          // (margin^+)^{1/p}, in [0, n^{1/p}]
};

/// min_i (x . xi_i - v_i + 1) for scenario j.
inline long long min_margin(std::span<const int> x, const Instance& inst, int j) {
  long long best = std::numeric_limits<long long>::max();
  for (int i = 0; i < inst.n_targets; ++i) {
    auto row = inst.scenario_row(j, i);
    long long dot = 0;
    for (int k = 0; k < inst.n_elements; ++k) dot += static_cast<long long>(x[k]) * row[k];
    best = std::min(best, dot - inst.coverage[i] + 1);
  }
  return best;
}

/// Coverage score g(x, xi^j) = min_i ((x . xi_i - v_i + 1)^+)^{1/p}.
/// Both orderings of clamp and min coincide (fbar is sign-preserving).
inline double g_value(std::span<const int> x, const Instance& inst, int j) {
  const long long m = min_margin(x, inst, j);
  return m <= 0 ? 0.0 : fbar(m, inst.p);
}

inline ScenarioMargins scenario_margins(std::span<const int> x, const Instance& inst) {
  ScenarioMargins out;
  out.margin.resize(inst.n_scenarios);
  out.g.resize(inst.n_scenarios);
  for (int j = 0; j < inst.n_scenarios; ++j) {
    out.margin[j] = min_margin(x, inst, j);
    out.g[j] = out.margin[j] <= 0 ? 0.0 : fbar(out.margin[j], inst.p);
  }
  return out;
}

struct VarCvar {
  double var = 0.0;
  double cvar = 0.0;
};

/// Empirical (1-eps)-VaR and CVaR of a sample with equal weights 1/N.
/// VaR is the smallest sample value y with #{values <= y}/N >= 1-eps;
/// CVaR = VaR + (1/(N eps)) sum (values - VaR)^+.
inline VarCvar var_cvar(std::vector<double> values, double eps) {
  if (values.empty()) throw std::invalid_argument("var_cvar: empty sample");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("var_cvar: eps outside (0,1)");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  // Smallest k with k/N >= 1-eps; the 1e-12 slack absorbs representation noise
  // when N (1-eps) is an exact integer.
  std::size_t k = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * (1.0 - eps) - 1e-12));
  if (k < 1) k = 1;
  if (k > n) k = n;
  VarCvar out;
  out.var = values[k - 1];
  double excess = 0.0;
  for (double v : values)
    if (v > out.var) excess += v - out.var;
  out.cvar = out.var + excess / (static_cast<double>(n) * eps);
  return out;
}

/// Membership test for the feasible region: delta/eps + CVaR_{1-eps}[-g] <= 0
/// within the given slack tolerance.
inline bool z_membership(std::span<const int> x, const Instance& inst,
                         double tol = 1e-7) {
  auto sm = scenario_margins(x, inst);
  std::vector<double> neg(sm.g.size());
  for (std::size_t j = 0; j < sm.g.size(); ++j) neg[j] = -sm.g[j];
  const auto vc = var_cvar(std::move(neg), inst.epsilon);
  return inst.delta / inst.epsilon + vc.cvar <= tol;
}

/// Existential-form membership: exists gamma >= 0, z <= 0 with
/// delta - gamma eps <= (1/N) sum z_j and z_j + gamma <= g_j. For fixed gamma
/// the best z_j is min(0, g_j - gamma); the slack is concave piecewise linear
/// in gamma with kinks at the g_j, so scanning {0} u {g_j} is exact.
inline bool z_membership_existential(std::span<const int> x, const Instance& inst,
                                     double tol = 1e-7) {
  auto sm = scenario_margins(x, inst);
  const int n_scen = inst.n_scenarios;
  std::vector<double> candidates = sm.g;
  candidates.push_back(0.0);
  for (double gamma : candidates) {
    if (gamma < 0.0) continue;
    double sum_z = 0.0;
    for (double g : sm.g) sum_z += std::min(0.0, g - gamma);
    if (inst.delta - gamma * inst.epsilon <= sum_z / n_scen + tol) return true;
  }
  return false;
}

/// The certificate (gamma, z) attaining membership, if any: gamma from the
/// candidate scan, z_j = min(0, g_j - gamma).
struct MembershipCertificate {
  double gamma = 0.0;
  std::vector<double> z;
};

inline std::optional<MembershipCertificate> membership_certificate(
    std::span<const int> x, const Instance& inst, double tol = 1e-7) {
  auto sm = scenario_margins(x, inst);
  const int n_scen = inst.n_scenarios;
  std::vector<double> candidates = sm.g;
  candidates.push_back(0.0);
  std::sort(candidates.begin(), candidates.end());
  for (double gamma : candidates) {
    if (gamma < 0.0) continue;
    double sum_z = 0.0;
    for (double g : sm.g) sum_z += std::min(0.0, g - gamma);
    if (inst.delta - gamma * inst.epsilon <= sum_z / n_scen + tol) {
      MembershipCertificate cert;
      cert.gamma = gamma;
      cert.z.resize(n_scen);
      for (int j = 0; j < n_scen; ++j) cert.z[j] = std::min(0.0, sm.g[j] - gamma);
      return cert;
    }
  }
  return std::nullopt;
}

/// Probability that each independent Bernoulli(q_i) row reaches its coverage
/// level when sum(x) elements are selected: prod_i P(Bin(sum x, q_i) >= v_i).
inline double true_reliability(std::span<const int> x, std::span<const double> q,
                               std::span<const int> v) {
  if (q.size() != v.size()) throw std::invalid_argument("true_reliability: size mismatch");
  long long m = 0;
  for (int xi : x) m += xi;
  double out = 1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (v[i] > m) return 0.0;
    const double qi = q[i];
    // P(Bin(m, qi) >= v_i) by the pmf recurrence.
    double pmf = std::pow(1.0 - qi, static_cast<double>(m));  // s = 0
    double tail = (v[i] <= 0) ? pmf : 0.0;
    for (long long s = 1; s <= m; ++s) {
      if (qi >= 1.0) {
        pmf = (s == m) ? 1.0 : 0.0;
      } else {
        pmf *= (static_cast<double>(m - s + 1) / static_cast<double>(s)) *
               (qi / (1.0 - qi));
      }
      if (s >= v[i]) tail += pmf;
    }
    if (qi >= 1.0) tail = 1.0;  // degenerate row: all entries are ones
    out *= std::min(1.0, std::max(0.0, tail));
  }
  return out;
}

/// Fraction of training scenarios fully covered by x.
inline double empirical_reliability(std::span<const int> x, const Instance& inst) {
  int covered = 0;
  for (int j = 0; j < inst.n_scenarios; ++j)
    if (min_margin(x, inst, j) >= 1) ++covered;
  return static_cast<double>(covered) / inst.n_scenarios;
}

}  // namespace drcover

#endif  // DRCOVER_RISK_HPP_
