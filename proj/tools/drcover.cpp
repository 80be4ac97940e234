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
// Command-line front end: instance generation, solves in the three cut
// modes, the exhaustive oracle, the sample-average baseline, and the two
// experiment sweeps.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drcover/drcover.hpp"

namespace {

using namespace drcover;

void print_solution(const Solution& sol) {
  std::cout << "status " << to_string(sol.status);
  if (!sol.x.empty()) std::cout << "  objective " << sol.objective;
  std::cout << "  gap% " << sol.gap_percent << "  wall_s " << sol.wall_seconds;
  for (const auto& [family, count] : sol.cut_counts)
    std::cout << "  " << family << " " << count;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for robust chance-constrained set covering"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a random instance JSON");
  GeneratorSpec spec;
  double gen_delta = 0.1, gen_epsilon = 0.1, gen_p = 2.0;
  std::vector<int> gen_coverage;
  std::string gen_out = "instance.json", truth_out;
  gen->add_option("--n", spec.n, "element count");
  gen->add_option("--targets", spec.targets, "target count I");
  gen->add_option("--samples", spec.scenarios, "training scenario count N");
  gen->add_option("--delta", gen_delta, "ambiguity radius");
  gen->add_option("--epsilon", gen_epsilon, "risk level");
  gen->add_option("--p", gen_p, "norm order");
  gen->add_option("--q-low", spec.q_low, "lower success probability");
  gen->add_option("--q-high", spec.q_high, "upper success probability");
  gen->add_option("--noise", spec.noise_scale, "Gaussian noise scale");
  gen->add_option("--cost-min", spec.cost_min, "minimum cost");
  gen->add_option("--cost-max", spec.cost_max, "maximum cost");
  gen->add_option("--coverage", gen_coverage,
                  "per-target coverage levels (default all ones)")
      ->delimiter(',');
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--out", gen_out, "output instance path");
  gen->add_option("--truth-out", truth_out,
                  "optional path for the ground-truth q vector");

  // solve / enumerate / saa ---------------------------------------------
  std::string in_path, out_path;
  std::string mode_name = "two-stage";
  SolveConfig config;
  auto add_solve_common = [&](CLI::App* cmd) {
    cmd->add_option("--in", in_path, "instance JSON path")->required();
    cmd->add_option("--out", out_path, "solution JSON path");
    cmd->add_option("--time-limit", config.time_limit_seconds, "seconds");
    cmd->add_option("--gap-tol", config.tolerances.gap, "relative gap tolerance");
    cmd->add_option("--seed", config.seed, "solver seed");
  };
  auto* solve = app.add_subcommand("solve", "solve an instance exactly");
  solve->add_option("--mode", mode_name, "two-stage | single | cross");
  add_solve_common(solve);
  auto* enumerate = app.add_subcommand("enumerate", "exhaustive oracle solve");
  add_solve_common(enumerate);
  auto* saa = app.add_subcommand("saa", "sample-average baseline solve");
  add_solve_common(saa);

  // oos ------------------------------------------------------------------
  auto* oos = app.add_subcommand("oos", "out-of-sample reliability sweep");
  std::vector<double> oos_deltas = {0.05, 0.07, 0.09, 0.11, 0.13, 0.15,
                                    0.17, 0.19, 0.21, 0.23, 0.25, 0.27};
  std::vector<int> oos_samples = {100};
  double oos_epsilon = 0.1, oos_p = 2.0;
  int oos_reps = 5;
  std::string oos_mode = "single", oos_out = "oos_out";
  double oos_time_limit = 60.0;
  std::uint64_t oos_seed = 0;
  int oos_n = 30, oos_targets = 10;
  oos->add_option("--deltas", oos_deltas, "radius ladder")->delimiter(',');
  oos->add_option("--samples", oos_samples, "training sizes N")->delimiter(',');
  oos->add_option("--epsilon", oos_epsilon, "risk level");
  oos->add_option("--p", oos_p, "norm order");
  oos->add_option("--reps", oos_reps, "replications per cell");
  oos->add_option("--seed", oos_seed, "base seed");
  oos->add_option("--n", oos_n, "element count");
  oos->add_option("--targets", oos_targets, "target count");
  oos->add_option("--mode", oos_mode, "solver mode for the robust model");
  oos->add_option("--time-limit", oos_time_limit, "per-solve seconds");
  oos->add_option("--out", oos_out, "output directory");

  // bench ------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "benchmark sweep");
  std::vector<int> bench_n = {20}, bench_targets = {10}, bench_samples = {20};
  std::vector<double> bench_deltas = {0.05, 0.1, 0.2, 0.3};
  std::vector<double> bench_epsilons = {0.05, 0.1};
  std::vector<std::string> bench_modes = {"two-stage", "single", "cross"};
  double bench_p = 2.0, bench_time_limit = 60.0;
  int bench_reps = 5;
  std::uint64_t bench_seed = 0;
  std::string bench_out = "bench_out";
  bench->add_option("--n-list", bench_n, "element counts")->delimiter(',');
  bench->add_option("--target-list", bench_targets, "target counts")->delimiter(',');
  bench->add_option("--deltas", bench_deltas, "radii")->delimiter(',');
  bench->add_option("--epsilons", bench_epsilons, "risk levels")->delimiter(',');
  bench->add_option("--samples", bench_samples, "training sizes")->delimiter(',');
  bench->add_option("--modes", bench_modes, "solver modes")->delimiter(',');
  bench->add_option("--p", bench_p, "norm order");
  bench->add_option("--time-limit", bench_time_limit, "per-solve seconds");
  bench->add_option("--reps", bench_reps, "replications per cell");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.coverage = gen_coverage;
      auto out = generate_instance(spec, gen_delta, gen_epsilon, gen_p);
      write_instance(out.instance, gen_out);
      if (!truth_out.empty()) {
        nlohmann::json tj;
        tj["q"] = out.q;
        std::ofstream f(truth_out);
        f << tj.dump(1, '\t') << '\n';
      }
      std::cout << "wrote " << gen_out << '\n';
    } else if (solve->parsed() || enumerate->parsed() || saa->parsed()) {
      auto inst = read_instance(in_path);
      Solution sol;
      if (solve->parsed()) {
        config.mode = mode_from_string(mode_name);
        sol = solve_drc(inst, config);
      } else if (enumerate->parsed()) {
        sol = enumerate_optimum(inst);
      } else {
        sol = solve_saa(inst, config);
      }
      print_solution(sol);
      if (!out_path.empty()) {
        write_solution(sol, out_path);
        std::cout << "wrote " << out_path << '\n';
      }
    } else if (oos->parsed()) {
      GeneratorSpec base;
      base.seed = oos_seed;
      base.n = oos_n;
      base.targets = oos_targets;
      SolveConfig drc_cfg;
      drc_cfg.mode = mode_from_string(oos_mode);
      drc_cfg.time_limit_seconds = oos_time_limit;
      drc_cfg.max_hull_cuts_per_scenario = 2;
      drc_cfg.max_benders_cuts_per_round = 150;
      SolveConfig saa_cfg;
      saa_cfg.time_limit_seconds = oos_time_limit;
      auto rows = run_oos_study(base, oos_deltas, oos_samples, oos_epsilon,
                                oos_p, oos_reps, drc_cfg, saa_cfg, oos_out);
      std::cout << "wrote " << oos_out << "/oos.csv (" << rows.size()
                << " rows)\n";
    } else if (bench->parsed()) {
      GeneratorSpec base;
      base.seed = bench_seed;
      std::vector<SolveMode> modes;
      for (const auto& name : bench_modes) modes.push_back(mode_from_string(name));
      SolveConfig cfg;
      cfg.time_limit_seconds = bench_time_limit;
      cfg.max_hull_cuts_per_scenario = 2;
      cfg.max_benders_cuts_per_round = 150;
      auto rows = run_benchmark(base, bench_n, bench_targets, bench_deltas,
                                bench_epsilons, bench_samples, modes, bench_p,
                                bench_reps, cfg, bench_out);
      std::cout << "wrote " << bench_out << "/bench.csv (" << rows.size()
                << " rows)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
