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

// Acceptance suite. Each criterion runs standalone (--criterion N) or as
// part of the full set, and prints exactly one PASS/FAIL line.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "zoforge/alloc_track.hpp"
#include "zoforge/cli/config.hpp"
#include "zoforge/cli/csv.hpp"
#include "zoforge/cli/runner.hpp"
#include "zoforge/engine.hpp"
#include "zoforge/models/dataset.hpp"
#include "zoforge/models/logistic.hpp"
#include "zoforge/models/mlp.hpp"
#include "zoforge/models/quadratic.hpp"
#include "zoforge/models/transformer.hpp"
#include "zoforge/oracle.hpp"
#include "zoforge/rng.hpp"

using namespace zoforge;

namespace {

const Batch kDummyBatch{1, 1, {0.0}, {0}};

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& message) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += message;
    }
  }
  void note(const std::string& message) {
    if (!detail.empty()) detail += "; ";
    detail += message;
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Batch gaussian_batch(std::size_t rows, std::size_t feature_dim,
                     std::size_t num_classes, std::uint64_t seed) {
  Batch batch;
  batch.rows = rows;
  batch.feature_dim = feature_dim;
  batch.inputs.resize(rows * feature_dim);
  batch.labels.resize(rows);
  GaussianStream stream(seed);
  for (double& v : batch.inputs) v = stream.next();
  for (std::size_t r = 0; r < rows; ++r) {
    batch.labels[r] = static_cast<int>(r % num_classes);
  }
  return batch;
}

Batch token_batch(std::size_t rows, std::size_t seq_len, std::size_t vocab,
                  std::size_t num_classes, std::uint64_t seed) {
  Batch batch;
  batch.rows = rows;
  batch.feature_dim = seq_len;
  batch.inputs.resize(rows * seq_len);
  batch.labels.resize(rows);
  SplitMix64 gen(seed);
  for (double& v : batch.inputs) {
    v = static_cast<double>(bounded_u64(gen, vocab));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    batch.labels[r] = static_cast<int>(bounded_u64(gen, num_classes));
  }
  return batch;
}


struct ModelUnderTest {
  std::unique_ptr<LossFunction> loss;
  Batch batch;
};

std::vector<ModelUnderTest> all_model_kinds(std::uint64_t seed) {
  std::vector<ModelUnderTest> models;
  models.push_back({make_quadratic(64, 4, 3.0, seed), kDummyBatch});
  models.push_back(
      {make_logistic(6, 3, 3, seed + 1), gaussian_batch(8, 6, 3, seed + 2)});
  models.push_back(
      {make_mlp(5, 6, 3, seed + 3), gaussian_batch(8, 5, 3, seed + 4)});
  models.push_back({make_tiny_transformer(16, 6, 8, 2, 2, seed + 5),
                    token_batch(4, 6, 16, 2, seed + 6)});
  return models;
}

// --- Criterion 1: restoration and seed replay ------------------------------

Check criterion1() {
  Check check;
  SplitMix64 gen(0xC1);
  std::size_t triples = 0;
  double worst_restore = 0.0;

  for (auto& [loss, batch] : all_model_kinds(100)) {
    const std::size_t num_layers = loss->num_layers();
    for (int trial = 0; trial < 25; ++trial) {
      ++triples;
      // Random (theta, seed, n).
      ParameterVector theta = loss->initial_parameters();
      GaussianStream jitter(gen.next());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] += 0.02 * jitter.next();
      }
      const std::uint64_t seed = gen.next();
      const auto drop_count =
          static_cast<std::uint32_t>(bounded_u64(gen, num_layers + 1));

      PerturbationSpec spec;
      spec.seed = seed;
      spec.mu = 1e-3;
      spec.dropped = select_dropped_layers(
          static_cast<std::uint32_t>(num_layers), drop_count, gen.next());

      const std::vector<double> before = snapshot(theta);
      perturb_parameters(theta, spec, +1.0);
      perturb_parameters(theta, spec, -2.0);
      perturb_parameters(theta, spec, +1.0);
      const std::vector<double> after = snapshot(theta);

      for (std::size_t i = 0; i < before.size(); ++i) {
        const double rel = std::abs(after[i] - before[i]) /
                           std::max(1.0, std::abs(before[i]));
        worst_restore = std::max(worst_restore, rel);
      }
      for (std::uint32_t li : spec.dropped) {
        const IndexRange r = theta.partition().layers()[li];
        for (std::size_t i = r.offset; i < r.offset + r.len; ++i) {
          check.expect(after[i] == before[i],
                       "dropped layer element changed bitwise");
        }
      }

      // Seed replay: one full step must equal a manual replica that feeds
      // both passes the identical canonical-order draws.
      OptimizerConfig cfg;
      cfg.learning_rate = 0.01;
      cfg.mu = 1e-3;
      cfg.steps = 1;
      cfg.drop_count = drop_count;
      cfg.base_seed = gen.next();

      ParameterVector engine_theta(before, theta.partition());
      const StepRecord record =
          lezo_step(engine_theta, *loss, batch, cfg, 0);

      ParameterVector replica(before, theta.partition());
      PerturbationSpec replica_spec;
      const SeedSchedule seeds{cfg.base_seed};
      replica_spec.seed = seeds.derive(SeedPurpose::perturbation, 0);
      replica_spec.mu = cfg.mu;
      if (drop_count > 0) {
        replica_spec.dropped = select_dropped_layers(
            static_cast<std::uint32_t>(num_layers), drop_count,
            seeds.derive(SeedPurpose::layer_select, 0));
      }
      check.expect(record.dropped == replica_spec.dropped,
                   "dropped set does not replay");
      perturb_parameters(replica, replica_spec, +1.0);
      perturb_parameters(replica, replica_spec, -2.0);
      perturb_parameters(replica, replica_spec, +1.0);
      const double step_scale = -cfg.learning_rate * record.projected_grad;
      GaussianStream update_stream(replica_spec.seed);
      for_each_active_range(replica.partition(), replica_spec.dropped,
                            [&](std::size_t off, std::size_t len) {
                              for (std::size_t i = off; i < off + len; ++i) {
                                replica[i] += step_scale * update_stream.next();
                              }
                            });
      check.expect(snapshot(engine_theta) == snapshot(replica),
                   "update pass draws differ from perturb pass draws");
    }
  }
  check.expect(worst_restore <= 1e-12,
               "restoration error " + fmt(worst_restore) + " > 1e-12");
  check.note(std::to_string(triples) + " triples, worst restore rel err " +
             fmt(worst_restore));
  return check;
}

// --- Criterion 2: MeZO equivalence -----------------------------------------

Check criterion2() {
  Check check;
  std::vector<ModelUnderTest> models;
  models.push_back({make_quadratic(24, 3, 2.0, 7), kDummyBatch});
  models.push_back(
      {make_logistic(6, 2, 2, 8), gaussian_batch(8, 6, 2, 9)});
  models.push_back({make_mlp(4, 5, 2, 10), gaussian_batch(8, 4, 2, 11)});

  for (auto& [loss, batch] : models) {
    OptimizerConfig cfg;
    cfg.learning_rate = 0.02;
    cfg.mu = 1e-3;
    cfg.steps = 50;
    cfg.drop_count = 0;
    cfg.base_seed = 31415;
    ParameterVector a = loss->initial_parameters();
    ParameterVector b = loss->initial_parameters();
    for (std::uint64_t t = 0; t < cfg.steps; ++t) {
      const StepRecord ra = lezo_step(a, *loss, batch, cfg, t);
      const StepRecord rb = mezo_step(b, *loss, batch, cfg, t);
      check.expect(ra.loss_plus == rb.loss_plus &&
                       ra.loss_minus == rb.loss_minus &&
                       ra.projected_grad == rb.projected_grad,
                   loss->name() + ": step records differ at t=" +
                       std::to_string(t));
      check.expect(snapshot(a) == snapshot(b),
                   loss->name() + ": trajectories diverge at t=" +
                       std::to_string(t));
      if (!check.ok) return check;
    }
  }
  check.note("3 objectives x 50 steps, bitwise equal");
  return check;
}

// --- Criterion 3: oracle trajectory agreement -------------------------------

Check criterion3() {
  Check check;
  double worst = 0.0;

  const auto compare = [&](const LossFunction& loss,
                           const oracle::BatchProvider& batch_at,
                           std::uint32_t drop_count, const char* label) {
    OptimizerConfig cfg;
    cfg.learning_rate = 0.02;
    cfg.mu = 1e-3;
    cfg.steps = 20;
    cfg.drop_count = drop_count;
    cfg.base_seed = 2718281;

    ParameterVector engine_theta = loss.initial_parameters();
    std::vector<std::vector<double>> engine_traj;
    for (std::uint64_t t = 0; t < cfg.steps; ++t) {
      lezo_step(engine_theta, loss, batch_at(t), cfg, t);
      engine_traj.push_back(snapshot(engine_theta));
    }
    const auto oracle_traj = oracle::explicit_z_replay(
        loss, loss.initial_parameters(), cfg, cfg.steps, batch_at);

    for (std::size_t t = 0; t < engine_traj.size(); ++t) {
      for (std::size_t i = 0; i < engine_traj[t].size(); ++i) {
        const double a = engine_traj[t][i];
        const double b = oracle_traj[t][i];
        const double rel =
            std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9});
        worst = std::max(worst, rel);
      }
    }
    check.expect(worst <= 1e-10, std::string(label) + ": rel err " +
                                     fmt(worst) + " > 1e-10 (n=" +
                                     std::to_string(drop_count) + ")");
  };

  {
    auto loss = make_quadratic(8, 4, 3.0, 40);
    const auto batch_at = [](std::uint64_t) { return kDummyBatch; };
    for (std::uint32_t n : {0u, 1u, 3u}) compare(*loss, batch_at, n, "quadratic");
  }
  {
    DatasetSpec spec;
    spec.kind = DatasetKind::synthetic_gaussian_blobs;
    spec.feature_dim = 4;
    spec.num_classes = 4;
    spec.num_samples = 64;
    spec.seed = 3;
    const Dataset data = load_dataset(spec);
    auto loss = make_logistic(4, 4, 4, 41);
    const std::uint64_t seed = 2718281;
    const auto batch_at = [&, seed](std::uint64_t t) {
      return sample_batch(data.train, 8, seed, t);
    };
    for (std::uint32_t n : {0u, 1u, 3u}) compare(*loss, batch_at, n, "logistic");
  }
  {
    DatasetSpec spec;
    spec.kind = DatasetKind::synthetic_gaussian_blobs;
    spec.feature_dim = 5;
    spec.num_classes = 2;
    spec.num_samples = 64;
    spec.seed = 4;
    const Dataset data = load_dataset(spec);
    auto loss = make_mlp(5, 6, 2, 42);
    const std::uint64_t seed = 2718281;
    const auto batch_at = [&, seed](std::uint64_t t) {
      return sample_batch(data.train, 8, seed, t);
    };
    for (std::uint32_t n : {0u, 1u}) compare(*loss, batch_at, n, "mlp");
  }

  check.note("worst per-element rel err " + fmt(worst));
  return check;
}

// --- Criterion 4: unbiasedness and 1/sqrt(K) decay ---------------------------

Check criterion4() {
  Check check;
  auto loss = make_quadratic(8, 2, 4.0, 5);
  const ParameterVector theta(
      std::vector<double>{1.0, -0.5, 0.25, 2.0, -1.5, 0.75, 1.25, -2.0},
      loss->partition());
  const std::vector<std::uint32_t> dropped{1};  // 4 active of 8

  const auto big =
      oracle::unbiasedness_test(*loss, theta, dropped, 100000, 1e-3, 271);
  check.expect(big.rel_error < 0.02,
               "K=1e5 rel error " + fmt(big.rel_error) + " >= 2%");

  // Log-log slope of the error over K in {1e3, 1e4, 1e5}, averaged over 16
  // replicate streams to tame the chi-distributed per-run noise.
  const std::size_t ks[] = {1000, 10000, 100000};
  double mean_log_err[3] = {0.0, 0.0, 0.0};
  const int replicates = 16;
  for (int rep = 0; rep < replicates; ++rep) {
    for (int i = 0; i < 3; ++i) {
      const double err = oracle::unbiasedness_test(*loss, theta, dropped,
                                                   ks[i], 1e-3,
                                                   9000 + 31 * rep + i)
                             .rel_error;
      mean_log_err[i] += std::log(err);
    }
  }
  for (double& v : mean_log_err) v /= replicates;

  // Least-squares slope over the three (log K, mean log err) points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = std::log(static_cast<double>(ks[i]));
    sx += x;
    sy += mean_log_err[i];
    sxx += x * x;
    sxy += x * mean_log_err[i];
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  check.expect(std::abs(slope + 0.5) <= 0.1,
               "log-log slope " + fmt(slope) + " outside -0.5 +- 0.1");
  check.note("K=1e5 rel err " + fmt(big.rel_error) + ", slope " + fmt(slope));
  return check;
}

// --- Criterion 5: convergence scaling ---------------------------------------

Check criterion5() {
  Check check;
  // rho d is varied through the model dimension at full density: the
  // schedule lr = 1/(4 (rho d + 4) L) makes steps-to-threshold scale
  // linearly with the active dimension (predicted ratio 4 between 512 and
  // 128; band pinned from the oracle runs).
  const std::vector<std::size_t> dims{128, 256, 512};
  const std::vector<double> keeps{1.0};
  oracle::SweepOptions options;
  options.layers = 8;
  options.theta0_norm = 10.0;
  options.max_steps = 300000;
  const double threshold = 4.0;
  const std::size_t repeats = 10;

  const auto trials = oracle::convergence_scaling_sweep(
      dims, keeps, threshold, repeats, 0xC5C5, options);

  for (const auto& t : trials) {
    check.expect(t.converged, "trial d=" + std::to_string(t.dim) +
                                  " rep=" + std::to_string(t.repeat_index) +
                                  " did not converge");
  }
  if (!check.ok) return check;

  std::vector<double> active_dims, mean_steps_list;
  for (std::size_t d : dims) {
    active_dims.push_back(static_cast<double>(d));
    mean_steps_list.push_back(oracle::mean_steps(trials, d, 1.0));
  }
  const double ratio = mean_steps_list[2] / mean_steps_list[0];
  check.expect(ratio >= 2.5 && ratio <= 5.5,
               "T(rho d=512)/T(rho d=128) = " + fmt(ratio) +
                   " outside [2.5, 5.5]");

  const double spearman =
      oracle::spearman_rank_correlation(active_dims, mean_steps_list);
  check.expect(spearman > 0.9,
               "Spearman(T, rho d) = " + fmt(spearman) + " <= 0.9");

  check.note("mean T = {" + fmt(mean_steps_list[0]) + ", " +
             fmt(mean_steps_list[1]) + ", " + fmt(mean_steps_list[2]) +
             "}, ratio " + fmt(ratio) + ", spearman " + fmt(spearman));
  return check;
}

// --- Criterion 6: compute savings -------------------------------------------

Check criterion6() {
  Check check;
  cli::ExperimentConfig cfg;
  cfg.model.kind = "transformer";
  cfg.model.vocab = 64;
  cfg.model.seq_len = 8;
  cfg.model.embed_dim = 128;
  cfg.model.layers = 8;  // blocks
  cfg.data.kind = DatasetKind::synthetic_gaussian_blobs;
  cfg.data.feature_dim = 8;
  cfg.data.num_classes = 2;
  cfg.data.num_samples = 64;
  cfg.learning_rates = {1e-4};
  cfg.mus = {1e-3};
  cfg.steps = 1;
  cfg.drop_count = 6;  // 75% of 8 blocks
  cfg.batch_size = 4;
  cfg.base_seed = 66;
  cfg.warmup_steps = 10;
  cfg.measure_steps = 100;

  // Token ids for the transformer come straight from the blob features;
  // ids are reduced modulo the vocab so any numeric dataset is usable.
  const cli::TimingReport report = cli::run_bench_timing(cfg, "");
  check.expect(report.model_dim >= 1000000,
               "model too small: d=" + std::to_string(report.model_dim));
  check.expect(report.perturb_ratio <= 0.35,
               "perturb ratio " + fmt(report.perturb_ratio) + " > 0.35");
  check.expect(report.update_ratio <= 0.35,
               "update ratio " + fmt(report.update_ratio) + " > 0.35");
  check.expect(report.forward_ratio >= 0.95 && report.forward_ratio <= 1.05,
               "forward ratio " + fmt(report.forward_ratio) +
                   " outside [0.95, 1.05]");
  check.note("d=" + std::to_string(report.model_dim) + ", perturb " +
             fmt(report.perturb_ratio) + ", update " +
             fmt(report.update_ratio) + ", forward " +
             fmt(report.forward_ratio) + ", step " + fmt(report.step_ratio));
  return check;
}

// --- Criterion 7: memory ----------------------------------------------------

Check criterion7() {
  Check check;
  if (!alloctrack::hook_installed()) {
    check.expect(false, "allocation hook not linked");
    return check;
  }
  const std::size_t kLayers = 8;
  for (std::size_t d : {1000u, 10000u, 100000u, 1000000u}) {
    auto loss = make_quadratic(d, kLayers, 1.0, 77);
    for (std::uint32_t n : {0u, 4u}) {
      ParameterVector theta = loss->initial_parameters();
      OptimizerConfig cfg;
      cfg.learning_rate = 1e-3;
      cfg.mu = 1e-3;
      cfg.steps = 2;
      cfg.drop_count = n;
      cfg.base_seed = 7;
      lezo_step(theta, *loss, kDummyBatch, cfg, 0);  // warm
      const StepRecord record = lezo_step(theta, *loss, kDummyBatch, cfg, 1);
      check.expect(record.alloc_delta_bytes <= 4096,
                   "d=" + std::to_string(d) + " n=" + std::to_string(n) +
                       ": step allocated " +
                       std::to_string(record.alloc_delta_bytes) + " bytes");
    }
  }

  // The instrumented allocator flags an O(d) clone.
  const std::size_t d = 100000;
  std::vector<double> theta(d, 1.0);
  AllocationLedger ledger;
  ledger.arm();
  std::vector<double> clone(theta);
  check.expect(ledger.read_delta() >= 8 * d, "clone not flagged");
  check.note("delta <= 4096 bytes for d in {1e3..1e6}, n in {0, N/2}");
  return check;
}

// --- Criterion 8: end-to-end training ---------------------------------------

Check criterion8() {
  Check check;
  namespace fs = std::filesystem;

  cli::ExperimentConfig cfg;
  cfg.model.kind = "logistic";
  cfg.model.layers = 2;
  cfg.data.kind = DatasetKind::synthetic_gaussian_blobs;
  cfg.data.feature_dim = 8;
  cfg.data.num_classes = 2;
  cfg.data.num_samples = 512;
  cfg.data.separation = 6.0;
  cfg.mode = cli::RunMode::grid_search;
  cfg.learning_rates = {1e-2, 1e-3};
  cfg.mus = {1e-3};
  cfg.steps = 20000;
  cfg.drop_count = 1;  // 50% of the 2 layers
  cfg.batch_size = 16;
  cfg.eval_every = 1000;
  cfg.base_seed = 88;

  // The first-order oracle confirms the task is learnable before the
  // zeroth-order result is judged.
  {
    DatasetSpec ds = cfg.data;
    ds.seed = cfg.data_seed();
    const Dataset data = load_dataset(ds);
    auto loss = make_logistic(8, 2, 2, cfg.model_seed());
    const std::uint64_t seed = cfg.base_seed;
    const auto batch_at = [&, seed](std::uint64_t t) {
      return sample_batch(data.train, 32, seed, t);
    };
    const auto traj = oracle::fo_sgd_baseline(
        *loss, loss->initial_parameters(), 0.5, 2000, batch_at);
    const double fo_acc = loss->accuracy(
        ParameterVector(traj.back(), loss->partition()),
        full_batch(data.train));
    check.expect(fo_acc >= 0.99,
                 "FO baseline accuracy " + fmt(fo_acc) + " < 0.99");
  }

  const std::string dir = "/tmp/zoforge_acceptance_c8";
  fs::remove_all(dir);
  const cli::GridResult grid = cli::run_grid_search(cfg, dir, 1);
  check.expect(grid.best_index >= 0, "grid search found no finite cell");
  if (grid.best_index >= 0) {
    const cli::GridCell& best = grid.cells[grid.best_index];
    check.expect(best.outcome.best_eval_metric >= 0.97,
                 "best cell eval accuracy " +
                     fmt(best.outcome.best_eval_metric) + " < 0.97");
    check.note("best lr=" + fmt(best.learning_rate) +
               ", eval acc " + fmt(best.outcome.best_eval_metric));
  }
  fs::remove_all(dir);
  return check;
}

// --- Criterion 9: determinism ------------------------------------------------

Check criterion9() {
  Check check;
  namespace fs = std::filesystem;

  cli::ExperimentConfig cfg;
  cfg.model.kind = "quadratic";
  cfg.model.dim = 64;
  cfg.model.layers = 4;
  cfg.model.condition_number = 3.0;
  cfg.data.kind = DatasetKind::synthetic_quadratic;
  cfg.data.feature_dim = 1;
  cfg.data.num_samples = 8;
  cfg.learning_rates = {0.02};
  cfg.mus = {1e-3};
  cfg.steps = 200;
  cfg.drop_count = 2;
  cfg.batch_size = 4;
  cfg.eval_every = 25;
  cfg.base_seed = 4096;

  const std::string dir_a = "/tmp/zoforge_acceptance_c9_a";
  const std::string dir_b = "/tmp/zoforge_acceptance_c9_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  cli::run_training(cfg, dir_a, 0.02, 1e-3);
  cli::run_training(cfg, dir_b, 0.02, 1e-3);

  const auto a = cli::read_step_csv(dir_a + "/steps.csv");
  const auto b = cli::read_step_csv(dir_b + "/steps.csv");
  check.expect(a.size() == b.size() && a.size() == cfg.steps,
               "row counts differ or are wrong");
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const bool metrics_match =
        a[i].eval_metric.has_value() == b[i].eval_metric.has_value() &&
        (!a[i].eval_metric || *a[i].eval_metric == *b[i].eval_metric);
    const bool equal = a[i].step == b[i].step &&
                       a[i].loss_plus == b[i].loss_plus &&
                       a[i].loss_minus == b[i].loss_minus &&
                       a[i].projected_grad == b[i].projected_grad &&
                       a[i].alloc_delta_bytes == b[i].alloc_delta_bytes &&
                       metrics_match;
    check.expect(equal, "value columns differ at row " + std::to_string(i));
    if (!check.ok) break;
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  check.note("200-step rerun bitwise equal on value columns");
  return check;
}

struct Criterion {
  int number;
  const char* title;
  std::function<Check()> run;
};

const Criterion kCriteria[] = {
    {1, "restoration & seed replay", criterion1},
    {2, "MeZO equivalence (n=0 bitwise)", criterion2},
    {3, "oracle trajectory agreement", criterion3},
    {4, "sparse estimator unbiasedness", criterion4},
    {5, "convergence scaling in rho d", criterion5},
    {6, "sparse compute savings", criterion6},
    {7, "constant memory overhead", criterion7},
    {8, "end-to-end training sanity", criterion8},
    {9, "bitwise determinism", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.number != only) continue;
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", result.ok ? "PASS" : "FAIL",
                criterion.number, criterion.title,
                result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures;
}
