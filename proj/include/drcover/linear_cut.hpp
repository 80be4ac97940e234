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

#ifndef DRCOVER_LINEAR_CUT_HPP_
#define DRCOVER_LINEAR_CUT_HPP_

#include <string>
#include <utility>
#include <vector>

namespace drcover {

enum class CutFamily { kBenders, kHull, kMixing };

inline const char* to_string(CutFamily f) {
  switch (f) {
    case CutFamily::kBenders: return "benders";
    case CutFamily::kHull: return "hull";
    case CutFamily::kMixing: return "mixing";
  }
  return "?";
}

/// One >=-inequality over the master variables:
///   sum_k x_coeffs[k] x_k + gamma_coeff gamma + sum (j,c) in z_coeffs c z_j
///   + sum_k gamma_bit_coeffs[k] gamma_k  >=  rhs.
/// Cuts of extended-polymatroid shape additionally carry the scenario, the
/// full slope d^j and the constant d^j_0 of the aggregation that feeds the
/// cross-scenario mixing machinery.
struct LinearCut {
  std::vector<double> x_coeffs;
  double gamma_coeff = 0.0;
  std::vector<std::pair<int, double>> z_coeffs;
  std::vector<double> gamma_bit_coeffs;
  double rhs = 0.0;
  CutFamily family = CutFamily::kBenders;

  int scenario = -1;
  double epi_slope = 0.0;
  double epi_constant = 0.0;

  /// LHS value at a point given as (x, gamma, z, gamma_bits).
  template <typename XVec, typename ZVec, typename BitVec>
  double lhs_value(const XVec& x, double gamma, const ZVec& z,
                   const BitVec& gamma_bits) const {
    double acc = gamma_coeff * gamma;
    for (std::size_t k = 0; k < x_coeffs.size(); ++k) acc += x_coeffs[k] * x[k];
    for (const auto& [j, c] : z_coeffs) acc += c * z[j];
    for (std::size_t k = 0; k < gamma_bit_coeffs.size(); ++k)
      acc += gamma_bit_coeffs[k] * gamma_bits[k];
    return acc;
  }
};

}  // namespace drcover

#endif  // DRCOVER_LINEAR_CUT_HPP_
