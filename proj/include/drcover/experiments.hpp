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
// Experiment harness: the random instance generator (noisy copies of a
// Bernoulli ground truth), the out-of-sample reliability study, and the
// benchmark sweep. All randomness flows through a portable generator so CSVs
// reproduce bit-for-bit across platforms.

#ifndef DRCOVER_EXPERIMENTS_HPP_
#define DRCOVER_EXPERIMENTS_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drcover/model.hpp"
#include "drcover/risk.hpp"
#include "drcover/solvers.hpp"

namespace drcover {

/// mt19937_64 with explicit output derivations (the raw engine is bit-exact
/// across conforming platforms; standard-library distributions are not).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in [0, 1), 53-bit resolution
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  long long uniform_int(long long lo, long long hi) {  // inclusive, unbiased
    const unsigned long long span = static_cast<unsigned long long>(hi - lo) + 1;
    if (span == 0) return static_cast<long long>(eng_());
    const unsigned long long max = ~0ULL;
    const unsigned long long rem = (max % span + 1) % span;
    for (;;) {
      const unsigned long long v = eng_();
      if (rem == 0 || v <= max - rem)
        return lo + static_cast<long long>(v % span);
    }
  }

  double normal() {  // Box-Muller with a cached spare
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64-style combiner for deriving cell seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + b * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct GeneratorSpec {
  std::uint64_t seed = 0;
  int n = 30;
  int targets = 10;
  int scenarios = 100;
  double q_low = 0.4;
  double q_high = 0.8;
  double noise_scale = 0.25;
  int cost_min = 1;
  int cost_max = 100;
  std::vector<int> coverage;  // empty = all ones

  void validate() const {
    if (!(0.0 <= q_low && q_low <= q_high && q_high <= 1.0))
      throw ModelError("generator: q range must satisfy 0 <= q_low <= q_high <= 1");
    if (noise_scale < 0.0) throw ModelError("generator: negative noise scale");
    if (n <= 0 || targets <= 0 || scenarios <= 0)
      throw ModelError("generator: sizes must be positive");
  }
};

struct GeneratedInstance {
  Instance instance;
  std::vector<double> q;  // per-target success probabilities of the truth
};

/// Draw order (fixed for reproducibility): q per target, the ground-truth
/// matrix entries row-major, per-scenario noise entries, then costs. The
/// model parameters (delta, epsilon, p) never consume randomness, so the
/// same seed yields the same samples across radii and risk levels.
inline GeneratedInstance generate_instance(const GeneratorSpec& spec, double delta,
                                           double epsilon, double p) {
  spec.validate();
  PortableRng rng(spec.seed);
  GeneratedInstance out;
  Instance& inst = out.instance;
  inst.n_elements = spec.n;
  inst.n_targets = spec.targets;
  inst.n_scenarios = spec.scenarios;
  inst.p = p;
  inst.delta = delta;
  inst.epsilon = epsilon;
  inst.coverage = spec.coverage.empty() ? std::vector<int>(spec.targets, 1)
                                        : spec.coverage;

  out.q.resize(spec.targets);
  for (auto& q : out.q) q = rng.uniform(spec.q_low, spec.q_high);

  std::vector<std::uint8_t> truth(static_cast<std::size_t>(spec.targets) * spec.n);
  for (int i = 0; i < spec.targets; ++i)
    for (int k = 0; k < spec.n; ++k)
      truth[static_cast<std::size_t>(i) * spec.n + k] =
          rng.uniform01() < out.q[i] ? 1 : 0;

  inst.samples.resize(static_cast<std::size_t>(spec.scenarios) * spec.targets *
                      spec.n);
  for (int j = 0; j < spec.scenarios; ++j)
    for (int i = 0; i < spec.targets; ++i)
      for (int k = 0; k < spec.n; ++k) {
        const double noisy =
            truth[static_cast<std::size_t>(i) * spec.n + k] +
            spec.noise_scale * rng.normal();
        // Round half away from zero, then clamp into {0, 1}.
        const long long rounded = std::llround(noisy);
        inst.samples[(static_cast<std::size_t>(j) * spec.targets + i) * spec.n +
                     k] = rounded <= 0 ? 0 : 1;
      }

  inst.cost.resize(spec.n);
  for (auto& c : inst.cost)
    c = static_cast<double>(rng.uniform_int(spec.cost_min, spec.cost_max));
  validate_instance(inst);
  return out;
}

/// P(round(b + s e) != b) for a standard normal e: the probability mass
/// beyond half a unit from b in the flipping direction.
inline double analytic_flip_probability(double noise_scale) {
  if (noise_scale == 0.0) return 0.0;
  const double z = 0.5 / noise_scale;
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

struct OosRow {
  double delta = 0.0;
  int n_samples = 0;
  int reps = 0;
  int drc_solved = 0, drc_inf = 0, drc_timeout = 0;
  double drc_mean_reliability = std::numeric_limits<double>::quiet_NaN();
  double drc_ci90 = 0.0;
  int saa_solved = 0, saa_inf = 0, saa_timeout = 0;
  double saa_mean_reliability = std::numeric_limits<double>::quiet_NaN();
  double saa_ci90 = 0.0;
};

namespace internal {

inline std::pair<double, double> mean_ci90(const std::vector<double>& values) {
  if (values.empty())
    return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (values.size() - 1));
  constexpr double z90 = 1.6448536269514722;
  return {mean, z90 * sd / std::sqrt(static_cast<double>(values.size()))};
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace internal

/// Out-of-sample study over a delta x N grid. Per cell: `replications`
/// instances (the sample tensor depends only on (seed, N, rep), so the same
/// instances are reused along the delta axis and the baseline is solved once
/// per (N, rep)). Solutions, ground-truth q vectors, and the summary CSV are
/// persisted under outdir. Returns the rows sorted by (delta, N).
inline std::vector<OosRow> run_oos_study(
    const GeneratorSpec& base, const std::vector<double>& deltas,
    const std::vector<int>& sample_sizes, double epsilon, double p,
    int replications, const SolveConfig& drc_config,
    const SolveConfig& saa_config, const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  std::map<std::pair<int, int>, Solution> saa_cache;
  std::map<std::pair<int, int>, GeneratedInstance> instance_cache;

  auto cell_instance = [&](int n_samples, int rep,
                           double delta) -> const GeneratedInstance& {
    auto key = std::make_pair(n_samples, rep);
    auto it = instance_cache.find(key);
    if (it == instance_cache.end()) {
      GeneratorSpec spec = base;
      spec.scenarios = n_samples;
      spec.seed = mix_seed(base.seed, mix_seed(n_samples, rep));
      it = instance_cache.emplace(key, generate_instance(spec, delta, epsilon, p))
               .first;
      std::ofstream truth(fs::path(outdir) /
                          ("truth_N" + std::to_string(n_samples) + "_rep" +
                           std::to_string(rep) + ".json"));
      nlohmann::json tj;
      tj["q"] = it->second.q;
      truth << tj.dump() << '\n';
    }
    it->second.instance.delta = delta;
    return it->second;
  };

  std::vector<OosRow> rows;
  for (double delta : deltas) {
    for (int n_samples : sample_sizes) {
      OosRow row;
      row.delta = delta;
      row.n_samples = n_samples;
      row.reps = replications;
      std::vector<double> drc_rel, saa_rel;
      for (int rep = 0; rep < replications; ++rep) {
        const auto& gen = cell_instance(n_samples, rep, delta);
        const Instance& inst = gen.instance;

        auto drc = solve_drc(inst, drc_config);
        std::ostringstream tag;
        tag << "N" << n_samples << "_rep" << rep << "_delta"
            << internal::format_double(delta);
        write_solution(drc, (fs::path(outdir) / ("sol_" + tag.str() + ".drc.json"))
                                .string());
        if (drc.status == SolveStatus::kInfeasible) ++row.drc_inf;
        if (drc.status == SolveStatus::kTimeLimit) ++row.drc_timeout;
        if (!drc.x.empty()) {
          ++row.drc_solved;
          drc_rel.push_back(true_reliability(drc.x, gen.q, inst.coverage));
        }

        auto key = std::make_pair(n_samples, rep);
        auto sit = saa_cache.find(key);
        if (sit == saa_cache.end()) {
          auto saa = solve_saa(inst, saa_config);
          write_solution(saa, (fs::path(outdir) /
                               ("sol_N" + std::to_string(n_samples) + "_rep" +
                                std::to_string(rep) + ".saa.json"))
                                  .string());
          sit = saa_cache.emplace(key, std::move(saa)).first;
        }
        const Solution& saa = sit->second;
        if (saa.status == SolveStatus::kInfeasible) ++row.saa_inf;
        if (saa.status == SolveStatus::kTimeLimit) ++row.saa_timeout;
        if (!saa.x.empty()) {
          ++row.saa_solved;
          saa_rel.push_back(true_reliability(saa.x, gen.q, inst.coverage));
        }
      }
      std::tie(row.drc_mean_reliability, row.drc_ci90) =
          internal::mean_ci90(drc_rel);
      std::tie(row.saa_mean_reliability, row.saa_ci90) =
          internal::mean_ci90(saa_rel);
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const OosRow& a, const OosRow& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    return a.n_samples < b.n_samples;
  });

  std::ofstream csv(fs::path(outdir) / "oos.csv");
  csv << "delta,N,reps,drc_solved,drc_inf,drc_timeout,drc_mean_reliability,"
         "drc_ci90,saa_solved,saa_inf,saa_timeout,saa_mean_reliability,saa_ci90\n";
  for (const auto& row : rows) {
    csv << internal::format_double(row.delta) << ',' << row.n_samples << ','
        << row.reps << ',' << row.drc_solved << ',' << row.drc_inf << ','
        << row.drc_timeout << ','
        << internal::format_double(row.drc_mean_reliability) << ','
        << internal::format_double(row.drc_ci90) << ',' << row.saa_solved << ','
        << row.saa_inf << ',' << row.saa_timeout << ','
        << internal::format_double(row.saa_mean_reliability) << ','
        << internal::format_double(row.saa_ci90) << '\n';
  }
  return rows;
}

struct BenchRow {
  int n = 0;
  int targets = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  int n_samples = 0;
  SolveMode mode = SolveMode::kTwoStage;
  int reps = 0;
  double mean_time = 0.0;
  double mean_gap = std::numeric_limits<double>::quiet_NaN();  // non-INF reps
  int unsolved = 0;
  int inf_count = 0;
};

/// Benchmark sweep mirroring the tabled protocol: per cell, `replications`
/// seeded instances (sample tensors shared across delta, epsilon, and mode),
/// average wall time over all runs, and average terminal gap over the
/// non-infeasible runs with the count of time-limited ones.
inline std::vector<BenchRow> run_benchmark(
    const GeneratorSpec& base, const std::vector<int>& n_list,
    const std::vector<int>& target_list, const std::vector<double>& deltas,
    const std::vector<double>& epsilons, const std::vector<int>& sample_sizes,
    const std::vector<SolveMode>& modes, double p, int replications,
    const SolveConfig& solve_config, const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  std::vector<BenchRow> rows;
  for (int n : n_list)
    for (int targets : target_list)
      for (int n_samples : sample_sizes)
        for (double delta : deltas)
          for (double epsilon : epsilons)
            for (SolveMode mode : modes) {
              BenchRow row;
              row.n = n;
              row.targets = targets;
              row.delta = delta;
              row.epsilon = epsilon;
              row.n_samples = n_samples;
              row.mode = mode;
              row.reps = replications;
              std::vector<double> gaps;
              double time_sum = 0.0;
              for (int rep = 0; rep < replications; ++rep) {
                GeneratorSpec spec = base;
                spec.n = n;
                spec.targets = targets;
                spec.scenarios = n_samples;
                spec.seed = mix_seed(
                    base.seed,
                    mix_seed(mix_seed(n, targets), mix_seed(n_samples, rep)));
                auto gen = generate_instance(spec, delta, epsilon, p);
                SolveConfig cfg = solve_config;
                cfg.mode = mode;
                auto sol = solve_drc(gen.instance, cfg);
                time_sum += sol.wall_seconds;
                if (sol.status == SolveStatus::kInfeasible) {
                  ++row.inf_count;
                } else {
                  gaps.push_back(sol.gap_percent);
                  if (sol.status == SolveStatus::kTimeLimit) ++row.unsolved;
                }
              }
              row.mean_time = time_sum / replications;
              if (!gaps.empty()) {
                double s = 0;
                for (double g : gaps) s += g;
                row.mean_gap = s / gaps.size();
              }
              rows.push_back(row);
            }

  std::ofstream csv(fs::path(outdir) / "bench.csv");
  csv << "n,I,delta,epsilon,N,mode,reps,mean_time_s,mean_gap_percent,unsolved,"
         "inf\n";
  for (const auto& row : rows) {
    csv << row.n << ',' << row.targets << ','
        << internal::format_double(row.delta) << ','
        << internal::format_double(row.epsilon) << ',' << row.n_samples << ','
        << to_string(row.mode) << ',' << row.reps << ','
        << internal::format_double(row.mean_time) << ','
        << internal::format_double(row.mean_gap) << ',' << row.unsolved << ','
        << row.inf_count << '\n';
  }
  return rows;
}

}  // namespace drcover

#endif  // DRCOVER_EXPERIMENTS_HPP_
