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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zoforge/cli/config.hpp"
#include "zoforge/engine.hpp"
#include "zoforge/models/dataset.hpp"

namespace zoforge::cli {

// Parallelism cap: min(requested, ZO_FORGE_THREADS, hardware cores).
std::size_t effective_jobs(std::size_t requested);

struct TrainOutcome {
  double final_eval_metric = 0.0;
  double final_eval_loss = 0.0;
  double best_eval_metric = 0.0;
  double best_eval_loss = 0.0;
  std::uint64_t best_step = 0;
  std::uint64_t steps_run = 0;
  bool diverged = false;
  double wall_seconds = 0.0;
  std::string steps_csv;
  std::string checkpoint;
};

// One training run: per-step CSV, best-eval checkpoint, summary JSON.
// Divergence (non-finite loss) ends the run early and is reported, not
// thrown.
TrainOutcome run_training(const ExperimentConfig& config,
                          const std::string& out_dir, double learning_rate,
                          double mu, bool write_summary = true);

struct PhaseStats {
  std::uint64_t steps = 0;
  double median_forward_ns = 0.0;
  double median_perturb_ns = 0.0;
  double median_update_ns = 0.0;
  double median_other_ns = 0.0;
  double median_step_ns = 0.0;
  double total_forward_ns = 0.0;
  double total_perturb_ns = 0.0;
  double total_update_ns = 0.0;
  double total_other_ns = 0.0;
  double total_step_ns = 0.0;
  // Fractions of the total step time; sum to 1 up to rounding.
  double frac_forward = 0.0;
  double frac_perturb = 0.0;
  double frac_update = 0.0;
  double frac_other = 0.0;
};

// Phase timings over `measure` steps after `warmup` steps on a fresh copy of
// the model's initial parameters, with the given drop count.
PhaseStats measure_phase_stats(const LossFunction& loss,
                               const ExperimentConfig& config,
                               std::uint32_t drop_count, std::uint64_t warmup,
                               std::uint64_t measure);

// Measures two variants in alternating blocks of a few steps each, so slow
// clock drift (thermal or host contention) cancels out of the A/B ratios.
// Each variant owns its parameters and step counter; both see the same
// per-step batches.
std::pair<PhaseStats, PhaseStats> measure_phase_stats_interleaved(
    const LossFunction& loss, const ExperimentConfig& config,
    std::uint32_t drop_a, std::uint32_t drop_b, std::uint64_t warmup,
    std::uint64_t measure);

struct TimingReport {
  std::size_t model_dim = 0;
  std::size_t num_layers = 0;
  std::uint32_t drop_count = 0;
  std::uint64_t warmup_steps = 0;
  std::uint64_t measure_steps = 0;
  PhaseStats dense;   // drop_count = 0
  PhaseStats sparse;  // configured drop_count
  double perturb_ratio = 0.0;  // sparse median / dense median
  double update_ratio = 0.0;
  double forward_ratio = 0.0;
  double step_ratio = 0.0;
  std::vector<std::string> warnings;
};

// Dense-vs-sparse step timing comparison; writes timing.json and timing.txt
// under out_dir when it is non-empty.
TimingReport run_bench_timing(const ExperimentConfig& config,
                              const std::string& out_dir);

struct GridCell {
  double learning_rate = 0.0;
  double mu = 0.0;
  TrainOutcome outcome;
  std::string dir;
};

struct GridResult {
  std::vector<GridCell> cells;
  int best_index = -1;  // -1 when every cell diverged
};

// Full lr x mu grid; cells run in parallel up to `jobs`. Selection: lowest
// finite best eval loss, ties broken by lower lr then lower mu. Writes
// grid.csv and summary.json.
GridResult run_grid_search(const ExperimentConfig& config,
                           const std::string& out_dir, std::size_t jobs = 1);

// Steps-to-threshold sweep (oracle harness) with CSV + JSON reporting;
// cells run in parallel up to `jobs` and merge in cell-key order.
void run_sweep(const ExperimentConfig& config, const std::string& out_dir,
               std::size_t jobs = 1);

struct SpeedupReport {
  std::optional<double> compute_speedup;
  std::optional<double> convergence_speedup;
  std::optional<double> wall_clock_speedup;
  double dense_median_step_ns = 0.0;
  double sparse_median_step_ns = 0.0;
  std::optional<std::uint64_t> dense_steps_to_target;
  std::optional<std::uint64_t> sparse_steps_to_target;
  double target = 0.0;
  bool target_is_accuracy = true;
};

// Compares two train-run CSVs on the same task. Steps-to-target uses the
// eval_metric column (>= target for accuracy, <= target for loss); a run
// that never reaches the target yields null speedups, not an error.
SpeedupReport compute_speedup_report(const std::string& dense_csv,
                                     const std::string& sparse_csv,
                                     double target, bool target_is_accuracy);

void write_speedup_json(const SpeedupReport& report, const std::string& path);

}  // namespace zoforge::cli
