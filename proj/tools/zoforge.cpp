// Copyright 2026 The ZO-Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// zoforge: zeroth-order optimization workbench.
//
// Subcommands: train, bench-timing, grid-search, sweep-convergence,
// report-speedup. Runs are fully determined by (config file, --seed); flags
// override config file keys.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "zoforge/cli/config.hpp"
#include "zoforge/cli/runner.hpp"

namespace {

using zoforge::cli::ExperimentConfig;
using zoforge::cli::RunMode;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_jobs) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", args.seed, "base seed for the whole run")
      ->required();
  cmd->add_option("--output", args.output, "output directory")->required();
  if (with_jobs) {
    cmd->add_option("--jobs", args.jobs,
                    "max parallel cells (capped by ZO_FORGE_THREADS)");
  }
}

ExperimentConfig load_with_overrides(const CommonArgs& args, RunMode mode) {
  ExperimentConfig cfg = zoforge::cli::load_experiment_config(args.config_path);
  cfg.mode = mode;
  cfg.base_seed = args.seed;
  cfg.output_path = args.output;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zoforge: zeroth-order optimization workbench"};
  app.require_subcommand(1);

  CommonArgs train_args, bench_args, grid_args, sweep_args;

  CLI::App* train = app.add_subcommand("train", "run one training experiment");
  add_common(train, train_args, /*with_jobs=*/false);

  CLI::App* bench = app.add_subcommand(
      "bench-timing", "dense-vs-sparse per-phase step timing");
  add_common(bench, bench_args, /*with_jobs=*/false);

  CLI::App* grid =
      app.add_subcommand("grid-search", "train over an lr x mu grid");
  add_common(grid, grid_args, /*with_jobs=*/true);

  CLI::App* sweep = app.add_subcommand("sweep-convergence",
                                       "steps-to-threshold scaling sweep");
  add_common(sweep, sweep_args, /*with_jobs=*/true);

  CLI::App* speedup = app.add_subcommand(
      "report-speedup", "compare dense and sparse training runs");
  std::string dense_csv, sparse_csv, metric = "accuracy", speedup_output;
  double target = 0.0;
  speedup->add_option("--dense", dense_csv, "dense run steps.csv")->required();
  speedup->add_option("--sparse", sparse_csv, "sparse run steps.csv")
      ->required();
  speedup->add_option("--target", target, "eval metric target")->required();
  speedup->add_option("--metric", metric, "accuracy or loss")
      ->check(CLI::IsMember({"accuracy", "loss"}));
  speedup->add_option("--output", speedup_output, "output JSON path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const ExperimentConfig cfg =
          load_with_overrides(train_args, RunMode::train);
      const auto outcome = zoforge::cli::run_training(
          cfg, cfg.output_path, cfg.learning_rate(), cfg.mu());
      std::printf("train: steps=%llu final_metric=%.6g best_loss=%.6g%s\n",
                  static_cast<unsigned long long>(outcome.steps_run),
                  outcome.final_eval_metric, outcome.best_eval_loss,
                  outcome.diverged ? " (diverged)" : "");
    } else if (bench->parsed()) {
      const ExperimentConfig cfg =
          load_with_overrides(bench_args, RunMode::bench_timing);
      const auto report = zoforge::cli::run_bench_timing(cfg, cfg.output_path);
      std::printf(
          "bench-timing: d=%zu perturb_ratio=%.3f update_ratio=%.3f "
          "forward_ratio=%.3f step_ratio=%.3f\n",
          report.model_dim, report.perturb_ratio, report.update_ratio,
          report.forward_ratio, report.step_ratio);
      for (const std::string& w : report.warnings) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      }
    } else if (grid->parsed()) {
      const ExperimentConfig cfg =
          load_with_overrides(grid_args, RunMode::grid_search);
      const auto result =
          zoforge::cli::run_grid_search(cfg, cfg.output_path, grid_args.jobs);
      if (result.best_index >= 0) {
        const auto& best = result.cells[result.best_index];
        std::printf("grid-search: best lr=%g mu=%g eval_loss=%.6g\n",
                    best.learning_rate, best.mu,
                    best.outcome.best_eval_loss);
      } else {
        std::printf("grid-search: every cell diverged\n");
      }
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg =
          load_with_overrides(sweep_args, RunMode::sweep_convergence);
      zoforge::cli::run_sweep(cfg, cfg.output_path, sweep_args.jobs);
      std::printf("sweep-convergence: results in %s\n",
                  cfg.output_path.c_str());
    } else if (speedup->parsed()) {
      const auto report = zoforge::cli::compute_speedup_report(
          dense_csv, sparse_csv, target, metric == "accuracy");
      zoforge::cli::write_speedup_json(report, speedup_output);
      std::printf("report-speedup: compute=%s convergence=%s\n",
                  report.compute_speedup
                      ? std::to_string(*report.compute_speedup).c_str()
                      : "null",
                  report.convergence_speedup
                      ? std::to_string(*report.convergence_speedup).c_str()
                      : "null");
    }
  } catch (const zoforge::cli::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
