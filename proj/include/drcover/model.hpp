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

#ifndef DRCOVER_MODEL_HPP_
#define DRCOVER_MODEL_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

namespace drcover {

/// Error type for malformed problem data or files.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem datum for the robust chance-constrained covering model.
///
/// A candidate selection x in {0,1}^n must keep every target i covered at
/// level coverage[i] with probability at least 1 - epsilon under every
/// distribution within transport distance delta of the empirical scenario
/// distribution. Immutable after construction; safe to share across threads.
struct Instance {
  int n_elements = 0;   // n
  int n_targets = 0;    // I
  int n_scenarios = 0;  // N
  double p = 2.0;       // norm order, >= 1
  double delta = 0.0;   // ambiguity radius, > 0
  double epsilon = 0.1; // risk level, in (0,1)
  std::vector<double> cost;          // length n, nonnegative
  std::vector<int> coverage;         // v_i, length I, in [1, n]
  std::vector<std::uint8_t> samples; // N x I x n, row-major, entries in {0,1}

  std::uint8_t sample(int j, int i, int k) const {
    return samples[(static_cast<std::size_t>(j) * n_targets + i) * n_elements + k];
  }

  /// Row xi_i of scenario j as a span of n binary entries.
  std::span<const std::uint8_t> scenario_row(int j, int i) const {
    return {samples.data() + (static_cast<std::size_t>(j) * n_targets + i) * n_elements,
            static_cast<std::size_t>(n_elements)};
  }

  /// v_m = max_i coverage[i].
  int max_coverage() const {
    return *std::max_element(coverage.begin(), coverage.end());
  }
};

enum class SolveStatus { kOptimal, kInfeasible, kTimeLimit, kUnboundedGuard };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kTimeLimit: return "TimeLimit";
    case SolveStatus::kUnboundedGuard: return "Unbounded-guard";
  }
  return "?";
}

inline SolveStatus status_from_string(const std::string& s) {
  if (s == "Optimal") return SolveStatus::kOptimal;
  if (s == "Infeasible") return SolveStatus::kInfeasible;
  if (s == "TimeLimit") return SolveStatus::kTimeLimit;
  if (s == "Unbounded-guard") return SolveStatus::kUnboundedGuard;
  throw ModelError("unknown status string: " + s);
}

/// Outcome of one solve. x is empty when no incumbent exists.
struct Solution {
  std::vector<int> x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  double gap_percent = 0.0;
  double wall_seconds = 0.0;
  std::map<std::string, long long> cut_counts;
};

enum class SolveMode { kTwoStage, kPlusSingle, kPlusCross };

inline const char* to_string(SolveMode m) {
  switch (m) {
    case SolveMode::kTwoStage: return "two-stage";
    case SolveMode::kPlusSingle: return "single";
    case SolveMode::kPlusCross: return "cross";
  }
  return "?";
}

inline SolveMode mode_from_string(const std::string& s) {
  if (s == "two-stage" || s == "two_stage" || s == "2stg") return SolveMode::kTwoStage;
  if (s == "single" || s == "plus_single") return SolveMode::kPlusSingle;
  if (s == "cross" || s == "plus_cross") return SolveMode::kPlusCross;
  throw ModelError("unknown mode string: " + s);
}

struct Tolerances {
  double integrality = 1e-6;
  double lp_feasibility = 1e-7;
  double cut_violation = 1e-6;
  double gap = 1e-6;
};

struct SolveConfig {
  SolveMode mode = SolveMode::kTwoStage;
  double time_limit_seconds = 3600.0;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  // Callback-cost bounds. 0 means unlimited.
  int max_benders_cuts_per_round = 200;
  int max_hull_cuts_per_scenario = 0;
};

/// Checks every Instance invariant; throws ModelError with index context.
inline void validate_instance(const Instance& inst) {
  if (inst.n_elements <= 0) throw ModelError("n must be positive");
  if (inst.n_targets <= 0) throw ModelError("I must be positive");
  if (inst.n_scenarios <= 0) throw ModelError("N must be positive");
  if (!(inst.p >= 1.0)) throw ModelError("norm order p < 1");
  if (!(inst.delta > 0.0)) throw ModelError("delta must be > 0");
  if (!(inst.epsilon > 0.0 && inst.epsilon < 1.0))
    throw ModelError("epsilon outside (0,1)");
  if (static_cast<int>(inst.cost.size()) != inst.n_elements)
    throw ModelError("cost vector length mismatch");
  for (int k = 0; k < inst.n_elements; ++k) {
    if (!std::isfinite(inst.cost[k]) || inst.cost[k] < 0.0) {
      std::ostringstream os;
      os << "cost[" << k << "] must be finite and nonnegative";
      throw ModelError(os.str());
    }
  }
  if (static_cast<int>(inst.coverage.size()) != inst.n_targets)
    throw ModelError("coverage vector length mismatch");
  for (int i = 0; i < inst.n_targets; ++i) {
    if (inst.coverage[i] < 1) {
      std::ostringstream os;
      os << "coverage level below 1 at target " << i;
      throw ModelError(os.str());
    }
    if (inst.coverage[i] > inst.n_elements) {
      std::ostringstream os;
      os << "coverage level above n at target " << i;
      throw ModelError(os.str());
    }
  }
  const std::size_t want = static_cast<std::size_t>(inst.n_scenarios) *
                           inst.n_targets * inst.n_elements;
  if (inst.samples.size() != want) throw ModelError("sample tensor shape mismatch");
  for (int j = 0; j < inst.n_scenarios; ++j)
    for (int i = 0; i < inst.n_targets; ++i)
      for (int k = 0; k < inst.n_elements; ++k)
        if (inst.sample(j, i, k) > 1) {
          std::ostringstream os;
          os << "non-binary sample at (j=" << j << ",i=" << i << ",k=" << k << ")";
          throw ModelError(os.str());
        }
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n_elements;
  j["I"] = inst.n_targets;
  j["N"] = inst.n_scenarios;
  j["p"] = inst.p;
  j["delta"] = inst.delta;
  j["epsilon"] = inst.epsilon;
  j["c"] = inst.cost;
  j["v"] = inst.coverage;
  auto scen = nlohmann::json::array();
  for (int s = 0; s < inst.n_scenarios; ++s) {
    auto mat = nlohmann::json::array();
    for (int i = 0; i < inst.n_targets; ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < inst.n_elements; ++k) row.push_back(int(inst.sample(s, i, k)));
      mat.push_back(std::move(row));
    }
    scen.push_back(std::move(mat));
  }
  j["samples"] = std::move(scen);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  for (const char* key : {"n", "I", "N", "p", "delta", "epsilon", "c", "v", "samples"})
    if (!j.contains(key)) throw ModelError(std::string("missing key: ") + key);
  Instance inst;
  inst.n_elements = j.at("n").get<int>();
  inst.n_targets = j.at("I").get<int>();
  inst.n_scenarios = j.at("N").get<int>();
  inst.p = j.at("p").get<double>();
  inst.delta = j.at("delta").get<double>();
  inst.epsilon = j.at("epsilon").get<double>();
  inst.cost = j.at("c").get<std::vector<double>>();
  inst.coverage = j.at("v").get<std::vector<int>>();
  const auto& scen = j.at("samples");
  inst.samples.reserve(static_cast<std::size_t>(inst.n_scenarios) *
                       inst.n_targets * inst.n_elements);
  for (const auto& mat : scen)
    for (const auto& row : mat)
      for (const auto& e : row) {
        const int b = e.get<int>();
        if (b != 0 && b != 1) throw ModelError("non-binary sample entry in file");
        inst.samples.push_back(static_cast<std::uint8_t>(b));
      }
  validate_instance(inst);
  return inst;
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot open for writing: " + path);
  out << instance_to_json(inst).dump(1, '\t') << '\n';
  if (!out) throw ModelError("I/O failure while writing: " + path);
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("parse error in " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline nlohmann::json solution_to_json(const Solution& sol) {
  nlohmann::json j;
  j["status"] = to_string(sol.status);
  j["objective"] = sol.objective;
  j["x"] = sol.x;
  j["gap_percent"] = sol.gap_percent;
  j["wall_seconds"] = sol.wall_seconds;
  j["cut_counts"] = sol.cut_counts;
  return j;
}

inline Solution solution_from_json(const nlohmann::json& j) {
  Solution sol;
  sol.status = status_from_string(j.at("status").get<std::string>());
  sol.objective = j.at("objective").get<double>();
  sol.x = j.at("x").get<std::vector<int>>();
  sol.gap_percent = j.at("gap_percent").get<double>();
  sol.wall_seconds = j.at("wall_seconds").get<double>();
  if (j.contains("cut_counts"))
    sol.cut_counts = j.at("cut_counts").get<std::map<std::string, long long>>();
  return sol;
}

inline void write_solution(const Solution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot open for writing: " + path);
  out << solution_to_json(sol).dump(1, '\t') << '\n';
}

inline Solution read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("parse error in " + path + ": " + e.what());
  }
  return solution_from_json(j);
}

}  // namespace drcover

#endif  // DRCOVER_MODEL_HPP_
