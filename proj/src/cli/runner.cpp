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

#include "zoforge/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "zoforge/cli/checkpoint.hpp"
#include "zoforge/cli/csv.hpp"
#include "zoforge/oracle.hpp"

namespace zoforge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

json config_echo(const ExperimentConfig& c, double lr, double mu) {
  json model = {{"kind", c.model.kind},
                {"layers", c.model.layers},
                {"seed", c.model_seed()}};
  if (c.model.kind == "quadratic") {
    model["d"] = c.model.dim;
    model["condition_number"] = c.model.condition_number;
  } else if (c.model.kind == "mlp") {
    model["hidden"] = c.model.hidden;
  } else if (c.model.kind == "transformer") {
    model["vocab"] = c.model.vocab;
    model["seq_len"] = c.model.seq_len;
    model["embed_dim"] = c.model.embed_dim;
  }
  json data = {{"kind", to_string(c.data.kind)},
               {"feature_dim", c.data.feature_dim},
               {"num_classes", c.data.num_classes},
               {"num_samples", c.data.num_samples},
               {"seed", c.data_seed()},
               {"separation", c.data.separation},
               {"eval_fraction", c.data.eval_fraction}};
  if (!c.data.path.empty()) data["path"] = c.data.path;
  return json{{"model", model},
              {"data", data},
              {"optimizer",
               {{"learning_rate", lr},
                {"mu", mu},
                {"steps", c.steps},
                {"drop_count", c.drop_count},
                {"batch_size", c.batch_size}}},
              {"run",
               {{"mode", to_string(c.mode)},
                {"eval_every", c.eval_every},
                {"repeats", c.repeats},
                {"base_seed", c.base_seed}}}};
}

struct EvalResult {
  double loss = 0.0;
  double metric = 0.0;
};

EvalResult evaluate_model(const LossFunction& loss, const ParameterVector& pv,
                          const Batch& eval_batch) {
  EvalResult r;
  r.loss = loss.evaluate(pv, eval_batch);
  r.metric = loss.is_classifier() ? loss.accuracy(pv, eval_batch) : r.loss;
  return r;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

std::size_t effective_jobs(std::size_t requested) {
  // The env var replaces the default cap (machine cores) when set.
  std::size_t cap =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ZO_FORGE_THREADS")) {
    const unsigned long parsed = std::strtoul(env, nullptr, 10);
    if (parsed >= 1) cap = parsed;
  }
  return std::max<std::size_t>(1, std::min(requested, cap));
}

namespace {

// Runs fn(0..count) on up to `jobs` workers; order-independent tasks only.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(effective_jobs(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (std::thread& th : pool) th.join();
}

}  // namespace

TrainOutcome run_training(const ExperimentConfig& config,
                          const std::string& out_dir, double learning_rate,
                          double mu, bool write_summary) {
  config.validate();
  fs::create_directories(out_dir);

  DatasetSpec data_spec = config.data;
  data_spec.seed = config.data_seed();
  const Dataset dataset = load_dataset(data_spec);
  const std::unique_ptr<LossFunction> loss = build_model(config, dataset);
  ParameterVector theta = loss->initial_parameters();

  OptimizerConfig opt;
  opt.learning_rate = learning_rate;
  opt.mu = mu;
  opt.steps = config.steps;
  opt.drop_count = config.drop_count;
  opt.batch_size = config.batch_size;
  opt.base_seed = config.base_seed;
  opt.validate();

  const Batch eval_batch = full_batch(dataset.eval);
  const std::size_t batch_size =
      std::min(config.batch_size, dataset.train.size());

  TrainOutcome outcome;
  outcome.steps_csv = (fs::path(out_dir) / "steps.csv").string();
  outcome.checkpoint = (fs::path(out_dir) / "checkpoint.bin").string();
  outcome.best_eval_loss = std::numeric_limits<double>::infinity();

  std::ofstream csv(outcome.steps_csv, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + outcome.steps_csv);
  csv << kStepCsvHeader << "\n";

  const auto wall_start = Clock::now();
  bool wrote_checkpoint = false;
  for (std::uint64_t t = 0; t < config.steps; ++t) {
    StepRecord record;
    try {
      const Batch batch =
          sample_batch(dataset.train, batch_size, config.base_seed, t);
      record = lezo_step(theta, *loss, batch, opt, t);
    } catch (const numeric_error&) {
      outcome.diverged = true;
      break;
    }

    std::optional<double> eval_metric;
    if ((t + 1) % config.eval_every == 0 || t + 1 == config.steps) {
      EvalResult eval;
      try {
        eval = evaluate_model(*loss, theta, eval_batch);
      } catch (const numeric_error&) {
        outcome.diverged = true;
        csv << step_csv_row(record, std::nullopt) << "\n";
        ++outcome.steps_run;
        break;
      }
      if (!std::isfinite(eval.loss)) {
        outcome.diverged = true;
        csv << step_csv_row(record, std::nullopt) << "\n";
        ++outcome.steps_run;
        break;
      }
      eval_metric = eval.metric;
      outcome.final_eval_metric = eval.metric;
      outcome.final_eval_loss = eval.loss;
      if (eval.loss < outcome.best_eval_loss) {
        outcome.best_eval_loss = eval.loss;
        outcome.best_eval_metric = eval.metric;
        outcome.best_step = t;
        write_checkpoint(outcome.checkpoint, theta);
        wrote_checkpoint = true;
      }
    }
    csv << step_csv_row(record, eval_metric) << "\n";
    ++outcome.steps_run;
  }
  outcome.wall_seconds =
      std::chrono::duration<double>(Clock::now() - wall_start).count();
  if (!wrote_checkpoint) outcome.checkpoint.clear();

  if (write_summary) {
    json summary = {
        {"mode", "train"},
        {"base_seed", config.base_seed},
        {"final_eval_metric", outcome.final_eval_metric},
        {"final_eval_loss", outcome.final_eval_loss},
        {"best_eval_metric", outcome.best_eval_metric},
        {"best_eval_loss", outcome.best_eval_loss},
        {"best_step", outcome.best_step},
        {"steps_run", outcome.steps_run},
        {"diverged", outcome.diverged},
        {"wall_time_sec", outcome.wall_seconds},
        {"model_dim", loss->dim()},
        {"config", config_echo(config, learning_rate, mu)},
        {"artifacts",
         {{"steps_csv", "steps.csv"},
          {"checkpoint", wrote_checkpoint ? "checkpoint.bin" : ""}}}};
    if (outcome.diverged) {
      // JSON has no inf; encode the never-improved sentinel as null.
      if (!std::isfinite(outcome.best_eval_loss)) {
        summary["best_eval_loss"] = nullptr;
      }
    }
    write_json_file(summary, (fs::path(out_dir) / "summary.json").string());
  }
  return outcome;
}

namespace {

// One variant's measurement state: its own parameters, step counter and
// phase samples.
struct VariantRun {
  std::uint32_t drop_count = 0;
  ParameterVector theta;
  OptimizerConfig opt;
  std::uint64_t t = 0;
  std::vector<double> forward_ns, perturb_ns, update_ns, other_ns, step_ns;
  PhaseStats stats;

  void run_steps(const LossFunction& loss, const Dataset& dataset,
                 std::size_t batch_size, std::uint64_t base_seed,
                 std::uint64_t count, bool record_samples) {
    for (std::uint64_t k = 0; k < count; ++k, ++t) {
      const Batch batch =
          sample_batch(dataset.train, batch_size, base_seed, t);
      const auto t0 = Clock::now();
      const StepRecord record = lezo_step(theta, loss, batch, opt, t);
      const double wall_ns =
          std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
      if (!record_samples) continue;
      const double f = static_cast<double>(record.time_forward_ns);
      const double p = static_cast<double>(record.time_perturb_ns);
      const double u = static_cast<double>(record.time_update_ns);
      const double other = std::max(0.0, wall_ns - f - p - u);
      forward_ns.push_back(f);
      perturb_ns.push_back(p);
      update_ns.push_back(u);
      other_ns.push_back(other);
      step_ns.push_back(wall_ns);
      stats.total_forward_ns += f;
      stats.total_perturb_ns += p;
      stats.total_update_ns += u;
      stats.total_other_ns += other;
      stats.total_step_ns += wall_ns;
    }
  }

  void finalize() {
    stats.steps = step_ns.size();
    stats.median_forward_ns = median(forward_ns);
    stats.median_perturb_ns = median(perturb_ns);
    stats.median_update_ns = median(update_ns);
    stats.median_other_ns = median(other_ns);
    stats.median_step_ns = median(step_ns);
    if (stats.total_step_ns > 0.0) {
      stats.frac_forward = stats.total_forward_ns / stats.total_step_ns;
      stats.frac_perturb = stats.total_perturb_ns / stats.total_step_ns;
      stats.frac_update = stats.total_update_ns / stats.total_step_ns;
      stats.frac_other = stats.total_other_ns / stats.total_step_ns;
    }
  }
};

VariantRun make_variant(const LossFunction& loss,
                        const ExperimentConfig& config,
                        std::uint32_t drop_count, std::uint64_t total_steps) {
  VariantRun run;
  run.drop_count = drop_count;
  run.theta = loss.initial_parameters();
  run.opt.learning_rate = config.learning_rates[0];
  run.opt.mu = config.mus[0];
  run.opt.steps = total_steps;
  run.opt.drop_count = drop_count;
  run.opt.batch_size = config.batch_size;
  run.opt.base_seed = config.base_seed;
  return run;
}

}  // namespace

PhaseStats measure_phase_stats(const LossFunction& loss,
                               const ExperimentConfig& config,
                               std::uint32_t drop_count, std::uint64_t warmup,
                               std::uint64_t measure) {
  DatasetSpec data_spec = config.data;
  data_spec.seed = config.data_seed();
  const Dataset dataset = load_dataset(data_spec);
  const std::size_t batch_size =
      std::min(config.batch_size, dataset.train.size());

  VariantRun run = make_variant(loss, config, drop_count, warmup + measure);
  run.run_steps(loss, dataset, batch_size, config.base_seed, warmup, false);
  run.run_steps(loss, dataset, batch_size, config.base_seed, measure, true);
  run.finalize();
  return run.stats;
}

std::pair<PhaseStats, PhaseStats> measure_phase_stats_interleaved(
    const LossFunction& loss, const ExperimentConfig& config,
    std::uint32_t drop_a, std::uint32_t drop_b, std::uint64_t warmup,
    std::uint64_t measure) {
  DatasetSpec data_spec = config.data;
  data_spec.seed = config.data_seed();
  const Dataset dataset = load_dataset(data_spec);
  const std::size_t batch_size =
      std::min(config.batch_size, dataset.train.size());

  VariantRun a = make_variant(loss, config, drop_a, warmup + measure);
  VariantRun b = make_variant(loss, config, drop_b, warmup + measure);
  a.run_steps(loss, dataset, batch_size, config.base_seed, warmup, false);
  b.run_steps(loss, dataset, batch_size, config.base_seed, warmup, false);

  // Strict step-level alternation: host noise lands on both variants with
  // the same distribution, so it cancels from the A/B ratios.
  for (std::uint64_t k = 0; k < measure; ++k) {
    a.run_steps(loss, dataset, batch_size, config.base_seed, 1, true);
    b.run_steps(loss, dataset, batch_size, config.base_seed, 1, true);
  }
  a.finalize();
  b.finalize();
  return {a.stats, b.stats};
}

namespace {

double clock_granularity_ns() {
  double min_delta = 1e9;
  auto prev = Clock::now();
  for (int i = 0; i < 10000; ++i) {
    const auto now = Clock::now();
    const double delta =
        std::chrono::duration<double, std::nano>(now - prev).count();
    if (delta > 0.0) min_delta = std::min(min_delta, delta);
    prev = now;
  }
  return min_delta;
}

json phase_stats_json(const PhaseStats& s) {
  return json{{"steps", s.steps},
              {"median_ns",
               {{"forward", s.median_forward_ns},
                {"perturb", s.median_perturb_ns},
                {"update", s.median_update_ns},
                {"other", s.median_other_ns},
                {"step", s.median_step_ns}}},
              {"total_ns",
               {{"forward", s.total_forward_ns},
                {"perturb", s.total_perturb_ns},
                {"update", s.total_update_ns},
                {"other", s.total_other_ns},
                {"step", s.total_step_ns}}},
              {"fractions",
               {{"forward", s.frac_forward},
                {"perturb", s.frac_perturb},
                {"update", s.frac_update},
                {"other", s.frac_other}}}};
}

}  // namespace

TimingReport run_bench_timing(const ExperimentConfig& config,
                              const std::string& out_dir) {
  config.validate();

  DatasetSpec data_spec = config.data;
  data_spec.seed = config.data_seed();
  const Dataset dataset = load_dataset(data_spec);
  const std::unique_ptr<LossFunction> loss = build_model(config, dataset);

  TimingReport report;
  report.model_dim = loss->dim();
  report.num_layers = loss->num_layers();
  report.drop_count = config.drop_count;
  report.warmup_steps = config.warmup_steps;
  report.measure_steps = config.measure_steps;

  if (loss->dim() < 1000000) {
    report.warnings.push_back(
        "model has fewer than 1e6 parameters; phase timings may be noisy");
  }

  std::tie(report.dense, report.sparse) = measure_phase_stats_interleaved(
      *loss, config, 0, config.drop_count, config.warmup_steps,
      config.measure_steps);

  const auto safe_ratio = [](double a, double b) {
    return b > 0.0 ? a / b : 0.0;
  };
  report.perturb_ratio =
      safe_ratio(report.sparse.median_perturb_ns, report.dense.median_perturb_ns);
  report.update_ratio =
      safe_ratio(report.sparse.median_update_ns, report.dense.median_update_ns);
  report.forward_ratio =
      safe_ratio(report.sparse.median_forward_ns, report.dense.median_forward_ns);
  report.step_ratio =
      safe_ratio(report.sparse.median_step_ns, report.dense.median_step_ns);

  const double granularity = clock_granularity_ns();
  const double min_median =
      std::min({report.dense.median_forward_ns, report.dense.median_perturb_ns,
                report.dense.median_update_ns, report.sparse.median_forward_ns,
                report.sparse.median_perturb_ns,
                report.sparse.median_update_ns});
  if (min_median < 100.0 * granularity) {
    report.warnings.push_back(
        "timer resolution (" + format_double(granularity) +
        " ns) is coarse relative to the smallest phase median (" +
        format_double(min_median) + " ns)");
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    json j = {{"model_dim", report.model_dim},
              {"num_layers", report.num_layers},
              {"drop_count", report.drop_count},
              {"warmup_steps", report.warmup_steps},
              {"measure_steps", report.measure_steps},
              {"dense", phase_stats_json(report.dense)},
              {"sparse", phase_stats_json(report.sparse)},
              {"ratios",
               {{"perturb", report.perturb_ratio},
                {"update", report.update_ratio},
                {"forward", report.forward_ratio},
                {"step", report.step_ratio}}},
              {"warnings", report.warnings}};
    write_json_file(j, (fs::path(out_dir) / "timing.json").string());

    std::ofstream txt((fs::path(out_dir) / "timing.txt").string(),
                      std::ios::trunc);
    txt << "model d=" << report.model_dim << "  layers=" << report.num_layers
        << "  drop_count=" << report.drop_count
        << "  steps=" << report.measure_steps << " (+"
        << report.warmup_steps << " warmup)\n\n";
    txt << "phase medians (ms)        dense      sparse     ratio\n";
    const auto line = [&](const char* name, double d, double s, double r) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%-22s %9.3f %11.3f %9.3f\n", name,
                    d / 1e6, s / 1e6, r);
      txt << buf;
    };
    line("forward", report.dense.median_forward_ns,
         report.sparse.median_forward_ns, report.forward_ratio);
    line("perturb", report.dense.median_perturb_ns,
         report.sparse.median_perturb_ns, report.perturb_ratio);
    line("update", report.dense.median_update_ns,
         report.sparse.median_update_ns, report.update_ratio);
    line("whole step", report.dense.median_step_ns,
         report.sparse.median_step_ns, report.step_ratio);
    txt << "\nfractions of dense step: forward " << report.dense.frac_forward
        << ", perturb " << report.dense.frac_perturb << ", update "
        << report.dense.frac_update << ", other " << report.dense.frac_other
        << "\n";
    for (const std::string& w : report.warnings) {
      txt << "warning: " << w << "\n";
    }
  }
  return report;
}

GridResult run_grid_search(const ExperimentConfig& config,
                           const std::string& out_dir, std::size_t jobs) {
  config.validate();
  if (config.learning_rates.empty() || config.mus.empty()) {
    throw config_error("grid_search: empty learning_rate or mu grid");
  }
  fs::create_directories(out_dir);

  GridResult result;
  for (double lr : config.learning_rates) {
    for (double mu : config.mus) {
      GridCell cell;
      cell.learning_rate = lr;
      cell.mu = mu;
      result.cells.push_back(cell);
    }
  }
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "cell_%03zu", i);
    result.cells[i].dir = (fs::path(out_dir) / name).string();
  }

  parallel_for(result.cells.size(), jobs, [&](std::size_t i) {
    GridCell& cell = result.cells[i];
    cell.outcome = run_training(config, cell.dir, cell.learning_rate, cell.mu,
                                /*write_summary=*/true);
  });

  // Lowest finite best eval loss; ties prefer lower lr, then lower mu.
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const GridCell& cell = result.cells[i];
    if (!std::isfinite(cell.outcome.best_eval_loss)) continue;
    if (result.best_index < 0) {
      result.best_index = static_cast<int>(i);
      continue;
    }
    const GridCell& best = result.cells[result.best_index];
    const auto key = [](const GridCell& c) {
      return std::tuple(c.outcome.best_eval_loss, c.learning_rate, c.mu);
    };
    if (key(cell) < key(best)) result.best_index = static_cast<int>(i);
  }

  std::ofstream table((fs::path(out_dir) / "grid.csv").string(),
                      std::ios::trunc);
  table << "learning_rate,mu,best_eval_loss,best_eval_metric,"
           "final_eval_metric,diverged,dir\n";
  for (const GridCell& cell : result.cells) {
    table << format_double(cell.learning_rate) << ','
          << format_double(cell.mu) << ','
          << (std::isfinite(cell.outcome.best_eval_loss)
                  ? format_double(cell.outcome.best_eval_loss)
                  : "nan")
          << ',' << format_double(cell.outcome.best_eval_metric) << ','
          << format_double(cell.outcome.final_eval_metric) << ','
          << (cell.outcome.diverged ? 1 : 0) << ','
          << fs::path(cell.dir).filename().string() << "\n";
  }
  table.close();

  json cells_json = json::array();
  for (const GridCell& cell : result.cells) {
    cells_json.push_back(
        {{"learning_rate", cell.learning_rate},
         {"mu", cell.mu},
         {"best_eval_loss", std::isfinite(cell.outcome.best_eval_loss)
                                ? json(cell.outcome.best_eval_loss)
                                : json(nullptr)},
         {"best_eval_metric", cell.outcome.best_eval_metric},
         {"diverged", cell.outcome.diverged},
         {"dir", fs::path(cell.dir).filename().string()}});
  }
  json summary = {{"mode", "grid_search"},
                  {"base_seed", config.base_seed},
                  {"cells", cells_json}};
  if (result.best_index >= 0) {
    const GridCell& best = result.cells[result.best_index];
    summary["best"] = {{"learning_rate", best.learning_rate},
                       {"mu", best.mu},
                       {"best_eval_loss", best.outcome.best_eval_loss},
                       {"best_eval_metric", best.outcome.best_eval_metric},
                       {"dir", fs::path(best.dir).filename().string()}};
  } else {
    summary["best"] = nullptr;
  }
  write_json_file(summary, (fs::path(out_dir) / "summary.json").string());
  return result;
}

void run_sweep(const ExperimentConfig& config, const std::string& out_dir,
               std::size_t jobs) {
  config.validate();
  fs::create_directories(out_dir);

  oracle::SweepOptions options;
  options.layers = config.sweep_layers;
  options.mu = config.mus[0];
  options.theta0_norm = config.sweep_theta0_norm;
  options.max_steps = config.sweep_max_steps;

  // Cells run independently; trial seeds derive from (d, active_dim, rep),
  // so the merged result is identical at any worker count. Merge order is
  // the (d, keep) cell order.
  struct SweepCell {
    std::size_t d;
    double keep;
    std::vector<oracle::ConvergenceTrial> trials;
  };
  std::vector<SweepCell> sweep_cells;
  for (std::size_t d : config.sweep_d_list) {
    for (double keep : config.sweep_keep_fractions) {
      sweep_cells.push_back({d, keep, {}});
    }
  }
  parallel_for(sweep_cells.size(), jobs, [&](std::size_t i) {
    const std::vector<std::size_t> one_d{sweep_cells[i].d};
    const std::vector<double> one_keep{sweep_cells[i].keep};
    sweep_cells[i].trials = oracle::convergence_scaling_sweep(
        one_d, one_keep, config.sweep_threshold, config.sweep_repeats,
        config.base_seed, options);
  });
  std::vector<oracle::ConvergenceTrial> trials;
  for (const SweepCell& cell : sweep_cells) {
    trials.insert(trials.end(), cell.trials.begin(), cell.trials.end());
  }

  std::ofstream csv((fs::path(out_dir) / "sweep.csv").string(),
                    std::ios::trunc);
  csv << "d,keep_fraction,active_dim,repeat,steps_to_threshold,converged,"
         "learning_rate\n";
  for (const auto& t : trials) {
    csv << t.dim << ',' << format_double(t.keep_fraction) << ','
        << t.active_dim << ',' << t.repeat_index << ','
        << t.steps_to_threshold << ',' << (t.converged ? 1 : 0) << ','
        << format_double(t.learning_rate) << "\n";
  }
  csv.close();

  // Aggregate per (d, keep) cell.
  json cells = json::array();
  std::vector<double> active_dims, mean_steps_list;
  for (std::size_t d : config.sweep_d_list) {
    for (double keep : config.sweep_keep_fractions) {
      double total = 0.0;
      std::size_t count = 0, non_converged = 0;
      std::size_t active_dim = 0;
      for (const auto& t : trials) {
        if (t.dim != d) continue;
        const double cell_keep =
            static_cast<double>(t.active_dim) / static_cast<double>(t.dim);
        if (std::abs(cell_keep - keep) > 1.0 / static_cast<double>(
                                                   2 * config.sweep_layers)) {
          continue;
        }
        active_dim = t.active_dim;
        if (t.converged) {
          total += static_cast<double>(t.steps_to_threshold);
          ++count;
        } else {
          ++non_converged;
        }
      }
      json cell = {{"d", d},
                   {"keep_fraction", keep},
                   {"active_dim", active_dim},
                   {"converged_repeats", count},
                   {"non_converged_repeats", non_converged}};
      if (count > 0) {
        const double mean = total / static_cast<double>(count);
        cell["mean_steps_to_threshold"] = mean;
        active_dims.push_back(static_cast<double>(active_dim));
        mean_steps_list.push_back(mean);
      } else {
        cell["mean_steps_to_threshold"] = nullptr;
      }
      cells.push_back(cell);
    }
  }

  json summary = {{"mode", "sweep_convergence"},
                  {"base_seed", config.base_seed},
                  {"threshold", config.sweep_threshold},
                  {"repeats", config.sweep_repeats},
                  {"layers", config.sweep_layers},
                  {"cells", cells}};
  if (active_dims.size() >= 2) {
    summary["spearman_steps_vs_active_dim"] =
        oracle::spearman_rank_correlation(active_dims, mean_steps_list);
  }
  write_json_file(summary, (fs::path(out_dir) / "summary.json").string());
}

SpeedupReport compute_speedup_report(const std::string& dense_csv,
                                     const std::string& sparse_csv,
                                     double target, bool target_is_accuracy) {
  SpeedupReport report;
  report.target = target;
  report.target_is_accuracy = target_is_accuracy;

  const auto analyze = [&](const std::string& path, double& median_step_ns,
                           std::optional<std::uint64_t>& steps_to_target) {
    const std::vector<StepCsvRow> rows = read_step_csv(path);
    if (rows.empty()) {
      throw std::runtime_error("speedup: no data rows in " + path);
    }
    std::vector<double> step_ns;
    step_ns.reserve(rows.size());
    for (const StepCsvRow& r : rows) {
      step_ns.push_back(static_cast<double>(
          r.time_forward_ns + r.time_perturb_ns + r.time_update_ns));
      if (!steps_to_target && r.eval_metric) {
        const bool reached = target_is_accuracy ? *r.eval_metric >= target
                                                : *r.eval_metric <= target;
        if (reached) steps_to_target = r.step + 1;
      }
    }
    median_step_ns = median(std::move(step_ns));
  };

  analyze(dense_csv, report.dense_median_step_ns,
          report.dense_steps_to_target);
  analyze(sparse_csv, report.sparse_median_step_ns,
          report.sparse_steps_to_target);

  if (report.sparse_median_step_ns > 0.0) {
    report.compute_speedup =
        report.dense_median_step_ns / report.sparse_median_step_ns;
  }
  if (report.dense_steps_to_target && report.sparse_steps_to_target &&
      *report.sparse_steps_to_target > 0) {
    report.convergence_speedup =
        static_cast<double>(*report.dense_steps_to_target) /
        static_cast<double>(*report.sparse_steps_to_target);
  }
  if (report.compute_speedup && report.convergence_speedup) {
    report.wall_clock_speedup =
        *report.compute_speedup * *report.convergence_speedup;
  }
  return report;
}

void write_speedup_json(const SpeedupReport& report, const std::string& path) {
  const auto opt = [](const auto& value) {
    return value ? json(*value) : json(nullptr);
  };
  json j = {{"compute_speedup", opt(report.compute_speedup)},
            {"convergence_speedup", opt(report.convergence_speedup)},
            {"wall_clock_speedup", opt(report.wall_clock_speedup)},
            {"target", report.target},
            {"metric", report.target_is_accuracy ? "accuracy" : "loss"},
            {"dense",
             {{"median_step_ns", report.dense_median_step_ns},
              {"steps_to_target", opt(report.dense_steps_to_target)}}},
            {"sparse",
             {{"median_step_ns", report.sparse_median_step_ns},
              {"steps_to_target", opt(report.sparse_steps_to_target)}}}};
  write_json_file(j, path);
}

}  // namespace zoforge::cli
