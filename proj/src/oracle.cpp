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

#include "zoforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zoforge/rng.hpp"

namespace zoforge::oracle {
namespace {

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// z for one step as an explicit full vector: draws for active coordinates in
// canonical order, zeros on dropped layers.
std::vector<double> materialize_z(const LayerPartition& partition,
                                  std::span<const std::uint32_t> dropped,
                                  std::uint64_t seed) {
  std::vector<double> z(partition.total_len(), 0.0);
  GaussianStream stream(seed);
  for_each_active_range(partition, dropped,
                        [&](std::size_t offset, std::size_t len) {
                          for (std::size_t i = offset; i < offset + len; ++i) {
                            z[i] = stream.next();
                          }
                        });
  return z;
}

}  // namespace

std::vector<std::vector<double>> explicit_z_replay(
    const LossFunction& loss, ParameterVector theta,
    const OptimizerConfig& config, std::uint64_t steps,
    const BatchProvider& batch_at) {
  config.validate();
  const SeedSchedule seeds{config.base_seed};
  const std::size_t dim = theta.size();
  std::vector<std::vector<double>> trajectory;
  trajectory.reserve(steps);

  for (std::uint64_t t = 0; t < steps; ++t) {
    std::vector<std::uint32_t> dropped;
    if (config.drop_count > 0) {
      dropped = select_dropped_layers(
          static_cast<std::uint32_t>(theta.partition().num_layers()),
          config.drop_count, seeds.derive(SeedPurpose::layer_select, t));
    }
    const std::uint64_t s = seeds.derive(SeedPurpose::perturbation, t);
    const std::vector<double> z = materialize_z(theta.partition(), dropped, s);
    const Batch batch = batch_at(t);

    std::vector<double> plus = snapshot(theta);
    std::vector<double> minus = plus;
    for (std::size_t i = 0; i < dim; ++i) {
      plus[i] += config.mu * z[i];
      minus[i] -= config.mu * z[i];
    }
    const double loss_plus =
        loss.evaluate(ParameterVector(std::move(plus), theta.partition()),
                      batch);
    const double loss_minus =
        loss.evaluate(ParameterVector(std::move(minus), theta.partition()),
                      batch);
    if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus)) {
      throw numeric_error("explicit_z_replay: non-finite loss");
    }
    const double projected_grad = (loss_plus - loss_minus) / (2.0 * config.mu);

    const double step_scale = -config.learning_rate * projected_grad;
    for (std::size_t i = 0; i < dim; ++i) {
      theta[i] += step_scale * z[i];
    }
    trajectory.push_back(snapshot(theta));
  }
  return trajectory;
}

std::vector<double> finite_difference_gradient(const LossFunction& loss,
                                               const ParameterVector& theta,
                                               const Batch& batch, double h) {
  std::vector<std::size_t> coords(theta.size());
  std::iota(coords.begin(), coords.end(), 0);
  return finite_difference_gradient_at(loss, theta, batch, h, coords);
}

std::vector<double> finite_difference_gradient_at(
    const LossFunction& loss, const ParameterVector& theta, const Batch& batch,
    double h, std::span<const std::size_t> coords) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_difference_gradient: h must be > 0");
  }
  std::vector<double> grad(theta.size(), 0.0);
  ParameterVector probe(snapshot(theta), theta.partition());
  for (std::size_t i : coords) {
    const double original = probe[i];
    const double step = h * (1.0 + std::abs(original));
    probe[i] = original + step;
    const double loss_plus = loss.evaluate(probe, batch);
    probe[i] = original - step;
    const double loss_minus = loss.evaluate(probe, batch);
    probe[i] = original;
    if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus)) {
      throw numeric_error("finite_difference_gradient: non-finite loss");
    }
    grad[i] = (loss_plus - loss_minus) / (2.0 * step);
  }
  return grad;
}

GradCheckReport check_gradients(const LossFunction& loss, const Batch& batch,
                                std::size_t probes, double tolerance,
                                std::uint64_t seed,
                                std::size_t coords_per_probe) {
  GradCheckReport report;
  report.probes = probes;
  for (std::size_t p = 0; p < probes; ++p) {
    ParameterVector theta = loss.initial_parameters();
    GaussianStream jitter(mix64(seed ^ (0x9E3779B97F4A7C15ull * (p + 1))));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] += 0.05 * jitter.next();
    }

    std::vector<std::size_t> coords;
    if (coords_per_probe == 0 || coords_per_probe >= theta.size()) {
      coords.resize(theta.size());
      std::iota(coords.begin(), coords.end(), 0);
    } else {
      SplitMix64 pick(mix64(seed + p));
      coords.reserve(coords_per_probe);
      for (std::size_t c = 0; c < coords_per_probe; ++c) {
        coords.push_back(bounded_u64(pick, theta.size()));
      }
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }

    const std::vector<double> analytic = loss.analytic_gradient(theta, batch);
    const std::vector<double> numeric =
        finite_difference_gradient_at(loss, theta, batch, 1e-5, coords);
    double grad_scale = 0.0;
    for (std::size_t i : coords) {
      grad_scale = std::max(grad_scale, std::abs(numeric[i]));
    }
    // Near-zero coordinates are judged against a thousandth of the gradient
    // scale; plain per-coordinate ratios there measure only FD truncation
    // noise.
    const double floor = std::max(1e-10, 1e-3 * grad_scale);
    for (std::size_t i : coords) {
      const double scale = std::max({std::abs(analytic[i]),
                                     std::abs(numeric[i]), floor});
      const double rel = std::abs(analytic[i] - numeric[i]) / scale;
      report.max_rel_error = std::max(report.max_rel_error, rel);
    }
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

UnbiasednessResult unbiasedness_test(const QuadraticLoss& loss,
                                     const ParameterVector& theta,
                                     std::span<const std::uint32_t> dropped,
                                     std::size_t num_estimates, double mu,
                                     std::uint64_t seed) {
  if (num_estimates == 0) {
    throw std::invalid_argument("unbiasedness_test: need at least 1 estimate");
  }
  const Batch dummy{1, 1, {0.0}, {0}};
  std::vector<double> target = loss.analytic_gradient(theta, dummy);
  // Sparse true gradient: zeros on dropped layers.
  {
    std::vector<double> mask(theta.size(), 0.0);
    for_each_active_range(theta.partition(), dropped,
                          [&](std::size_t offset, std::size_t len) {
                            std::fill(mask.begin() + offset,
                                      mask.begin() + offset + len, 1.0);
                          });
    for (std::size_t i = 0; i < target.size(); ++i) target[i] *= mask[i];
  }
  const double target_norm = norm(target);
  if (target_norm == 0.0) {
    throw std::invalid_argument(
        "unbiasedness_test: sparse true gradient is zero; move theta away "
        "from the optimum");
  }

  const std::size_t active = theta.partition().active_count(dropped);
  GaussianStream stream(seed);
  std::vector<double> z_active(active);
  std::vector<double> mean(theta.size(), 0.0);
  for (std::size_t k = 0; k < num_estimates; ++k) {
    for (double& z : z_active) z = stream.next();
    const std::vector<double> estimate =
        estimate_gradient_sparse(theta, loss, dummy, mu, z_active, dropped);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += estimate[i];
  }
  const double inv_k = 1.0 / static_cast<double>(num_estimates);
  for (double& v : mean) v *= inv_k;

  double err = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double diff = mean[i] - target[i];
    err += diff * diff;
  }
  UnbiasednessResult result;
  result.rel_error = std::sqrt(err) / target_norm;
  result.empirical_mean = std::move(mean);
  return result;
}

std::vector<std::vector<double>> fo_sgd_baseline(const LossFunction& loss,
                                                 ParameterVector theta,
                                                 double learning_rate,
                                                 std::uint64_t steps,
                                                 const BatchProvider& batch_at) {
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("fo_sgd_baseline: bad learning rate");
  }
  std::vector<std::vector<double>> trajectory;
  trajectory.reserve(steps);
  for (std::uint64_t t = 0; t < steps; ++t) {
    const Batch batch = batch_at(t);
    const std::vector<double> grad = loss.analytic_gradient(theta, batch);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] -= learning_rate * grad[i];
    }
    trajectory.push_back(snapshot(theta));
  }
  return trajectory;
}

std::vector<ConvergenceTrial> convergence_scaling_sweep(
    std::span<const std::size_t> d_list,
    std::span<const double> keep_fractions, double threshold,
    std::size_t repeats, std::uint64_t seed, const SweepOptions& options) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("sweep: threshold must be > 0");
  }
  std::vector<ConvergenceTrial> trials;
  const Batch dummy{1, 1, {0.0}, {0}};

  for (std::size_t dim : d_list) {
    if (dim % options.layers != 0) {
      throw std::invalid_argument(
          "sweep: every d must be divisible by the layer count");
    }
    for (double keep : keep_fractions) {
      if (!(keep > 0.0) || keep > 1.0) {
        throw std::invalid_argument("sweep: keep fraction must be in (0, 1]");
      }
      const auto drop_count = static_cast<std::uint32_t>(
          std::lround((1.0 - keep) * static_cast<double>(options.layers)));
      const std::size_t active_dim =
          (options.layers - drop_count) * (dim / options.layers);

      for (std::size_t rep = 0; rep < repeats; ++rep) {
        const std::uint64_t trial_seed =
            mix64(seed ^ mix64(dim * 0x9E3779B97F4A7C15ull +
                               active_dim * 0xBF58476D1CE4E5B9ull + rep));

        QuadraticLoss loss(dim, options.layers, /*condition_number=*/1.0,
                           trial_seed);
        // Schedule from the convergence analysis: 1 / (4 (rho d + 4) L).
        const double smoothness = loss.max_eigenvalue();
        OptimizerConfig config;
        config.learning_rate =
            1.0 / (4.0 * (static_cast<double>(active_dim) + 4.0) * smoothness);
        config.mu = options.mu;
        config.steps = options.max_steps;
        config.drop_count = drop_count;
        config.batch_size = 1;
        config.base_seed = trial_seed;

        // theta0 scaled to a fixed norm so the threshold means the same
        // thing at every d.
        ParameterVector theta = loss.initial_parameters();
        {
          const double scale = options.theta0_norm / norm(theta.view());
          for (std::size_t i = 0; i < theta.size(); ++i) theta[i] *= scale;
        }

        ConvergenceTrial trial;
        trial.dim = dim;
        trial.active_dim = active_dim;
        trial.keep_fraction =
            static_cast<double>(active_dim) / static_cast<double>(dim);
        trial.threshold = threshold;
        trial.learning_rate = config.learning_rate;
        trial.mu = config.mu;
        trial.repeat_index = rep;

        const auto grad_sq_norm = [&] {
          const std::vector<double> grad = loss.analytic_gradient(theta, dummy);
          double acc = 0.0;
          for (double g : grad) acc += g * g;
          return acc;
        };

        for (std::uint64_t t = 0; t < options.max_steps; ++t) {
          if (grad_sq_norm() < threshold) {
            trial.steps_to_threshold = t;
            trial.converged = true;
            break;
          }
          lezo_step(theta, loss, dummy, config, t);
        }
        if (!trial.converged && grad_sq_norm() < threshold) {
          trial.steps_to_threshold = options.max_steps;
          trial.converged = true;
        }
        trials.push_back(trial);
      }
    }
  }
  return trials;
}

double mean_steps(std::span<const ConvergenceTrial> trials, std::size_t dim,
                  double keep_fraction) {
  double total = 0.0;
  std::size_t count = 0;
  for (const ConvergenceTrial& t : trials) {
    if (t.dim == dim && std::abs(t.keep_fraction - keep_fraction) < 1e-12 &&
        t.converged) {
      total += static_cast<double>(t.steps_to_threshold);
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("mean_steps: no converged trials for cell");
  }
  return total / static_cast<double>(count);
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rank_correlation(std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length series");
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += rx[i];
    mean_y += ry[i];
  }
  mean_x /= n;
  mean_y /= n;
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean_x;
    const double dy = ry[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0) {
    throw std::invalid_argument("spearman: degenerate (constant) series");
  }
  return cov / std::sqrt(var_x * var_y);
}

}  // namespace zoforge::oracle
