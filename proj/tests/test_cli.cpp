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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "zoforge/cli/checkpoint.hpp"
#include "zoforge/cli/config.hpp"
#include "zoforge/cli/csv.hpp"
#include "zoforge/cli/runner.hpp"
#include "zoforge/models/quadratic.hpp"

using namespace zoforge;
using namespace zoforge::cli;

namespace fs = std::filesystem;

namespace {

std::string write_file(const std::string& path, const std::string& body) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << body;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string out_file = "/tmp/zoforge_cli_out.txt";
  const std::string command =
      std::string(ZOFORGE_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(command.c_str());
  if (output) *output = read_file(out_file);
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

const char* kQuadraticConfig = R"(
# tiny quadratic training run
[model]
kind = quadratic
d = 16
layers = 4
condition_number = 2.0

[data]
kind = synthetic_quadratic
feature_dim = 1
num_samples = 4

[optimizer]
learning_rate = 0.05
mu = 1e-3
steps = 25
drop_count = 1
batch_size = 1

[run]
eval_every = 5
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config file parses sections, lists and comments") {
  const std::string text = R"(
[model]
kind = logistic   # classifier
layers = 2

[data]
kind = synthetic_gaussian_blobs
feature_dim = 8
num_classes = 2
num_samples = 128
separation = 6.0

[optimizer]
learning_rate = 1e-2, 1e-3
mu = 1e-3
steps = 500
batch_size = 16

[run]
mode = grid_search
eval_every = 100
)";
  const ExperimentConfig cfg = parse_experiment_config(text, "test");
  CHECK(cfg.model.kind == "logistic");
  CHECK(cfg.model.layers == 2);
  CHECK(cfg.data.feature_dim == 8);
  CHECK(cfg.learning_rates == std::vector<double>{1e-2, 1e-3});
  CHECK(cfg.mus == std::vector<double>{1e-3});
  CHECK(cfg.steps == 500);
  CHECK(cfg.mode == RunMode::grid_search);
  cfg.validate();
}

TEST_CASE("unknown keys are rejected by name") {
  const std::string text = "[optimizer]\nlearning_rat = 0.1\n";
  try {
    parse_experiment_config(text, "test");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("learning_rat") != std::string::npos);
  }
}

TEST_CASE("list values are only legal in grid_search mode") {
  const std::string text =
      "[optimizer]\nlearning_rate = 0.1, 0.2\n[run]\nmode = train\n";
  const ExperimentConfig cfg = parse_experiment_config(text, "test");
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("config validation catches bad scalars") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.eval_every = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.eval_every = 5;
  cfg.learning_rates = {-1.0};
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("format_double round-trips values") {
  for (double v : {0.1, 1.0 / 3.0, 6.02e23, -0.0, 1e-300, 123456.789}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("checkpoint round-trips parameters and partition") {
  auto loss = make_quadratic(32, 4, 3.0, 9);
  ParameterVector pv = loss->initial_parameters();
  const std::string path = "/tmp/zoforge_test_ckpt.bin";
  write_checkpoint(path, pv);
  const ParameterVector back = read_checkpoint(path);
  CHECK(snapshot(back) == snapshot(pv));
  CHECK(back.partition() == pv.partition());
  std::remove(path.c_str());
}

TEST_CASE("checkpoint rejects a foreign file") {
  const std::string path =
      write_file("/tmp/zoforge_bad_ckpt.bin", "not a checkpoint at all");
  CHECK_THROWS(read_checkpoint(path));
  std::remove(path.c_str());
}

TEST_CASE("training writes one CSV row per step plus the header") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.base_seed = 42;
  const std::string dir = "/tmp/zoforge_train_rows";
  fs::remove_all(dir);
  const TrainOutcome outcome =
      run_training(cfg, dir, cfg.learning_rate(), cfg.mu());
  CHECK(outcome.steps_run == 25);
  CHECK_FALSE(outcome.diverged);

  const auto rows = read_step_csv(outcome.steps_csv);
  CHECK(rows.size() == 25);
  // Eval cadence: metric present every 5th row and on the last.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool expect_metric = (i + 1) % 5 == 0 || i + 1 == rows.size();
    CHECK(rows[i].eval_metric.has_value() == expect_metric);
  }
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
  CHECK(fs::exists(fs::path(dir) / "checkpoint.bin"));
  fs::remove_all(dir);
}

TEST_CASE("reruns reproduce the trajectory columns bitwise") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.base_seed = 7;
  const std::string dir_a = "/tmp/zoforge_rerun_a";
  const std::string dir_b = "/tmp/zoforge_rerun_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  run_training(cfg, dir_a, cfg.learning_rate(), cfg.mu());
  run_training(cfg, dir_b, cfg.learning_rate(), cfg.mu());
  const auto a = read_step_csv(dir_a + "/steps.csv");
  const auto b = read_step_csv(dir_b + "/steps.csv");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].step == b[i].step);
    CHECK(a[i].loss_plus == b[i].loss_plus);
    CHECK(a[i].loss_minus == b[i].loss_minus);
    CHECK(a[i].projected_grad == b[i].projected_grad);
    CHECK(a[i].eval_metric.has_value() == b[i].eval_metric.has_value());
    if (a[i].eval_metric) CHECK(*a[i].eval_metric == *b[i].eval_metric);
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("a singleton grid selects its only cell") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.mode = RunMode::grid_search;
  cfg.base_seed = 3;
  const std::string dir = "/tmp/zoforge_grid_single";
  fs::remove_all(dir);
  const GridResult result = run_grid_search(cfg, dir, 1);
  REQUIRE(result.cells.size() == 1);
  CHECK(result.best_index == 0);
  CHECK(fs::exists(fs::path(dir) / "grid.csv"));
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("a diverging cell is marked and the finite one selected") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.mode = RunMode::grid_search;
  cfg.steps = 400;
  // The first update at lr=1e160 pushes the quadratic loss past the double
  // range, so the next forward pass is non-finite. (Moderately huge rates
  // only stall: the two-sided difference underflows against the loss's ulp
  // and the projected gradient rounds to zero.)
  cfg.learning_rates = {1e160, 0.05};
  cfg.mus = {1e-3};
  cfg.base_seed = 11;
  const std::string dir = "/tmp/zoforge_grid_diverge";
  fs::remove_all(dir);
  const GridResult result = run_grid_search(cfg, dir, 1);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[0].outcome.diverged);
  REQUIRE(result.best_index == 1);
  CHECK(result.cells[1].learning_rate == 0.05);
  const std::string table = read_file(dir + "/grid.csv");
  CHECK(table.find("nan") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("grid search prefers the rate the baseline confirms") {
  // On well-separated blobs the higher rate of {0.5, 0.05} converges faster
  // for the first-order baseline (see the oracle suite) and wins the
  // zeroth-order grid on eval loss as well.
  ExperimentConfig cfg;
  cfg.model.kind = "logistic";
  cfg.model.layers = 2;
  cfg.data.kind = DatasetKind::synthetic_gaussian_blobs;
  cfg.data.feature_dim = 8;
  cfg.data.num_classes = 2;
  cfg.data.num_samples = 256;
  cfg.data.separation = 6.0;
  cfg.mode = RunMode::grid_search;
  cfg.learning_rates = {0.5, 0.05};
  cfg.mus = {1e-3};
  cfg.steps = 3000;
  cfg.drop_count = 0;
  cfg.batch_size = 16;
  cfg.eval_every = 250;
  cfg.base_seed = 77;
  const std::string dir = "/tmp/zoforge_grid_rates";
  fs::remove_all(dir);
  const GridResult result = run_grid_search(cfg, dir, 1);
  REQUIRE(result.best_index >= 0);
  CHECK(result.cells[result.best_index].learning_rate == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("bench timing self-comparison stays in the noise band") {
  // Dense measured against dense: every median ratio within [0.9, 1.1].
  ExperimentConfig cfg;
  cfg.model.kind = "transformer";
  cfg.model.vocab = 32;
  cfg.model.seq_len = 8;
  cfg.model.embed_dim = 64;
  cfg.model.layers = 4;
  cfg.data.kind = DatasetKind::synthetic_gaussian_blobs;
  cfg.data.feature_dim = 8;
  cfg.data.num_classes = 2;
  cfg.data.num_samples = 32;
  cfg.learning_rates = {1e-4};
  cfg.mus = {1e-3};
  cfg.batch_size = 4;
  cfg.base_seed = 9;
  cfg.warmup_steps = 5;
  cfg.measure_steps = 60;

  DatasetSpec ds = cfg.data;
  ds.seed = cfg.data_seed();
  const Dataset data = load_dataset(ds);
  const auto loss = build_model(cfg, data);
  const auto [a, b] = measure_phase_stats_interleaved(
      *loss, cfg, 0, 0, cfg.warmup_steps, cfg.measure_steps);
  for (double ratio : {a.median_forward_ns / b.median_forward_ns,
                       a.median_perturb_ns / b.median_perturb_ns,
                       a.median_update_ns / b.median_update_ns,
                       a.median_step_ns / b.median_step_ns}) {
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
  // Phase fractions cover the whole step.
  CHECK(std::abs(a.frac_forward + a.frac_perturb + a.frac_update +
                 a.frac_other - 1.0) <= 1e-9);
}

TEST_CASE("bench timing writes its reports") {
  ExperimentConfig cfg;
  cfg.model.kind = "quadratic";
  cfg.model.dim = 4096;
  cfg.model.layers = 8;
  cfg.data.kind = DatasetKind::synthetic_quadratic;
  cfg.data.feature_dim = 1;
  cfg.data.num_samples = 4;
  cfg.learning_rates = {1e-3};
  cfg.mus = {1e-3};
  cfg.drop_count = 4;
  cfg.batch_size = 1;
  cfg.base_seed = 3;
  cfg.warmup_steps = 3;
  cfg.measure_steps = 20;
  const std::string dir = "/tmp/zoforge_bench_artifacts";
  fs::remove_all(dir);
  const TimingReport report = run_bench_timing(cfg, dir);
  // Small model: the d >= 1e6 recommendation produces a warning.
  bool warned_small = false;
  for (const std::string& w : report.warnings) {
    if (w.find("1e6") != std::string::npos) warned_small = true;
  }
  CHECK(warned_small);
  CHECK(fs::exists(fs::path(dir) / "timing.json"));
  CHECK(fs::exists(fs::path(dir) / "timing.txt"));
  fs::remove_all(dir);
}

TEST_CASE("speedup of a run against itself is exactly one") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.base_seed = 5;
  const std::string dir = "/tmp/zoforge_speedup_self";
  fs::remove_all(dir);
  const TrainOutcome outcome =
      run_training(cfg, dir, cfg.learning_rate(), cfg.mu());
  const SpeedupReport report = compute_speedup_report(
      outcome.steps_csv, outcome.steps_csv, /*target=*/1e9,
      /*target_is_accuracy=*/false);
  REQUIRE(report.compute_speedup.has_value());
  CHECK(*report.compute_speedup == 1.0);
  REQUIRE(report.convergence_speedup.has_value());
  CHECK(*report.convergence_speedup == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("sparse transformer training reports a real compute speedup") {
  // Dense and 75%-dropped runs on the same transformer task; the phase-sum
  // medians must show at least a 1.3x per-step advantage for the sparse run.
  ExperimentConfig cfg;
  cfg.model.kind = "transformer";
  cfg.model.vocab = 32;
  cfg.model.seq_len = 8;
  cfg.model.embed_dim = 64;
  cfg.model.layers = 4;
  cfg.data.kind = DatasetKind::synthetic_gaussian_blobs;
  cfg.data.feature_dim = 8;
  cfg.data.num_classes = 2;
  cfg.data.num_samples = 32;
  cfg.learning_rates = {1e-4};
  cfg.mus = {1e-3};
  cfg.steps = 40;
  cfg.batch_size = 4;
  cfg.eval_every = 20;
  cfg.base_seed = 12;

  const std::string dense_dir = "/tmp/zoforge_speedup_dense";
  const std::string sparse_dir = "/tmp/zoforge_speedup_sparse";
  fs::remove_all(dense_dir);
  fs::remove_all(sparse_dir);
  cfg.drop_count = 0;
  const TrainOutcome dense = run_training(cfg, dense_dir, 1e-4, 1e-3);
  cfg.drop_count = 3;  // 75% of 4 blocks
  const TrainOutcome sparse = run_training(cfg, sparse_dir, 1e-4, 1e-3);

  const SpeedupReport report =
      compute_speedup_report(dense.steps_csv, sparse.steps_csv,
                             /*target=*/1e9, /*target_is_accuracy=*/false);
  REQUIRE(report.compute_speedup.has_value());
  INFO("compute speedup ", *report.compute_speedup);
  CHECK(*report.compute_speedup > 1.3);
  fs::remove_all(dense_dir);
  fs::remove_all(sparse_dir);
}

TEST_CASE("an unreachable target yields null speedup fields") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.base_seed = 5;
  const std::string dir = "/tmp/zoforge_speedup_null";
  fs::remove_all(dir);
  const TrainOutcome outcome =
      run_training(cfg, dir, cfg.learning_rate(), cfg.mu());
  const SpeedupReport report = compute_speedup_report(
      outcome.steps_csv, outcome.steps_csv, /*target=*/-1.0,
      /*target_is_accuracy=*/false);
  CHECK(report.compute_speedup.has_value());
  CHECK_FALSE(report.convergence_speedup.has_value());
  CHECK_FALSE(report.wall_clock_speedup.has_value());

  const std::string json_path = dir + "/speedup.json";
  write_speedup_json(report, json_path);
  const std::string body = read_file(json_path);
  CHECK(body.find("\"convergence_speedup\": null") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli rejects an unknown config key with exit status 2") {
  const std::string config = write_file("/tmp/zoforge_badkey/config.txt",
                                        "[optimizer]\nlearning_rat = 0.1\n");
  std::string output;
  const int status = run_cli(
      "train --config " + config + " --seed 1 --output /tmp/zoforge_badkey_out",
      &output);
  CHECK(status == 2);
  CHECK(output.find("learning_rat") != std::string::npos);
  fs::remove_all("/tmp/zoforge_badkey");
  fs::remove_all("/tmp/zoforge_badkey_out");
}

TEST_CASE("cli train run produces the expected artifacts") {
  const std::string config =
      write_file("/tmp/zoforge_cli_train/config.txt", kQuadraticConfig);
  const std::string out_dir = "/tmp/zoforge_cli_train/out";
  std::string output;
  const int status = run_cli(
      "train --config " + config + " --seed 21 --output " + out_dir, &output);
  CHECK(status == 0);
  CHECK(fs::exists(fs::path(out_dir) / "steps.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "summary.json"));
  const std::string summary = read_file(out_dir + "/summary.json");
  CHECK(summary.find("\"base_seed\": 21") != std::string::npos);
  fs::remove_all("/tmp/zoforge_cli_train");
}

TEST_CASE("cli report-speedup validates metric names") {
  std::string output;
  const int status = run_cli(
      "report-speedup --dense a.csv --sparse b.csv --target 0.5 "
      "--metric wrong --output /tmp/x.json",
      &output);
  CHECK(status != 0);
}

TEST_CASE("effective_jobs respects the environment cap") {
  setenv("ZO_FORGE_THREADS", "1", 1);
  CHECK(effective_jobs(8) == 1);
  setenv("ZO_FORGE_THREADS", "3", 1);
  CHECK(effective_jobs(8) == 3);
  CHECK(effective_jobs(2) == 2);
  unsetenv("ZO_FORGE_THREADS");
  CHECK(effective_jobs(1) == 1);
}

TEST_CASE("parallel grid cells reproduce the serial result") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.mode = RunMode::grid_search;
  cfg.learning_rates = {0.05, 0.02};
  cfg.mus = {1e-3, 2e-3};
  cfg.base_seed = 17;
  const std::string serial_dir = "/tmp/zoforge_grid_serial";
  const std::string parallel_dir = "/tmp/zoforge_grid_parallel";
  fs::remove_all(serial_dir);
  fs::remove_all(parallel_dir);

  const GridResult serial = run_grid_search(cfg, serial_dir, 1);
  setenv("ZO_FORGE_THREADS", "4", 1);
  const GridResult parallel = run_grid_search(cfg, parallel_dir, 4);
  unsetenv("ZO_FORGE_THREADS");

  REQUIRE(serial.cells.size() == parallel.cells.size());
  CHECK(serial.best_index == parallel.best_index);
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].learning_rate == parallel.cells[i].learning_rate);
    CHECK(serial.cells[i].outcome.best_eval_loss ==
          parallel.cells[i].outcome.best_eval_loss);
    CHECK(serial.cells[i].outcome.final_eval_metric ==
          parallel.cells[i].outcome.final_eval_metric);
  }
  CHECK(read_file(serial_dir + "/grid.csv") ==
        read_file(parallel_dir + "/grid.csv"));
  fs::remove_all(serial_dir);
  fs::remove_all(parallel_dir);
}

TEST_CASE("the checkpoint holds the best-eval parameters") {
  ExperimentConfig cfg = parse_experiment_config(kQuadraticConfig, "test");
  cfg.base_seed = 23;
  const std::string dir = "/tmp/zoforge_ckpt_best";
  fs::remove_all(dir);
  const TrainOutcome outcome =
      run_training(cfg, dir, cfg.learning_rate(), cfg.mu());
  REQUIRE(fs::exists(outcome.checkpoint));

  const ParameterVector best = read_checkpoint(outcome.checkpoint);
  DatasetSpec ds = cfg.data;
  ds.seed = cfg.data_seed();
  const Dataset data = load_dataset(ds);
  const auto loss = build_model(cfg, data);
  CHECK(best.partition() == loss->partition());
  const double ckpt_loss = loss->evaluate(best, full_batch(data.eval));
  CHECK(ckpt_loss == outcome.best_eval_loss);
  fs::remove_all(dir);
}

TEST_CASE("cli sweep-convergence emits csv and summary") {
  const std::string config = write_file("/tmp/zoforge_cli_sweep/config.txt",
                                        R"(
[model]
kind = quadratic
d = 32
layers = 8

[data]
kind = synthetic_quadratic
num_samples = 2

[optimizer]
mu = 1e-3

[sweep]
d_list = 32, 64
keep_fractions = 1.0
threshold = 4.0
repeats = 2
layers = 8
max_steps = 100000
)");
  const std::string out_dir = "/tmp/zoforge_cli_sweep/out";
  std::string output;
  const int status = run_cli("sweep-convergence --config " + config +
                                 " --seed 5 --output " + out_dir + " --jobs 2",
                             &output);
  CHECK(status == 0);
  CHECK(fs::exists(fs::path(out_dir) / "sweep.csv"));
  const std::string summary = read_file(out_dir + "/summary.json");
  CHECK(summary.find("spearman_steps_vs_active_dim") != std::string::npos);
  fs::remove_all("/tmp/zoforge_cli_sweep");
}

TEST_CASE("cli report-speedup writes the comparison json") {
  // Build one training run and compare it with itself through the CLI.
  const std::string config =
      write_file("/tmp/zoforge_cli_speedup/config.txt", kQuadraticConfig);
  const std::string run_dir = "/tmp/zoforge_cli_speedup/run";
  std::string output;
  int status = run_cli(
      "train --config " + config + " --seed 31 --output " + run_dir, &output);
  REQUIRE(status == 0);
  const std::string csv = run_dir + "/steps.csv";
  const std::string json_path = "/tmp/zoforge_cli_speedup/speedup.json";
  status = run_cli("report-speedup --dense " + csv + " --sparse " + csv +
                       " --target 100 --metric loss --output " + json_path,
                   &output);
  CHECK(status == 0);
  const std::string body = read_file(json_path);
  CHECK(body.find("\"compute_speedup\": 1.0") != std::string::npos);
  fs::remove_all("/tmp/zoforge_cli_speedup");
}

}  // TEST_SUITE
