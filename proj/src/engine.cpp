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

#include "zoforge/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zoforge/alloc_track.hpp"

namespace zoforge {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point from, Clock::time_point to) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count());
}

double timed_forward(const LossFunction& loss, const ParameterVector& params,
                     const Batch& batch, std::uint64_t& forward_ns) {
  // Model activations are the forward pass's own memory; accounting covers
  // optimizer-internal work only.
  alloctrack::PauseGuard pause;
  const auto t0 = Clock::now();
  const double value = loss.evaluate(params, batch);
  forward_ns += elapsed_ns(t0, Clock::now());
  return value;
}

}  // namespace

void PerturbationSpec::validate(const LayerPartition& partition) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("PerturbationSpec: mu must be positive");
  }
  validate_dropped(dropped, partition.num_layers());
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("OptimizerConfig: learning_rate must be > 0");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("OptimizerConfig: mu must be > 0");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("OptimizerConfig: batch_size must be >= 1");
  }
}

std::vector<std::uint32_t> select_dropped_layers(std::uint32_t num_layers,
                                                 std::uint32_t drop_count,
                                                 std::uint64_t seed) {
  if (drop_count > num_layers) {
    throw std::invalid_argument("select_dropped_layers: drop_count " +
                                std::to_string(drop_count) + " exceeds " +
                                std::to_string(num_layers) + " layers");
  }
  std::vector<std::uint32_t> indices(num_layers);
  for (std::uint32_t i = 0; i < num_layers; ++i) indices[i] = i;

  // Partial Fisher-Yates: the first drop_count entries are a uniform
  // drop_count-subset.
  SplitMix64 gen(seed);
  for (std::uint32_t i = 0; i < drop_count; ++i) {
    const std::uint64_t j = i + bounded_u64(gen, num_layers - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(drop_count);
  std::sort(indices.begin(), indices.end());
  return indices;
}

void perturb_parameters(ParameterVector& params, const PerturbationSpec& spec,
                        double multiplier) {
  spec.validate(params.partition());
  const double scale = multiplier * spec.mu;
  GaussianStream stream(spec.seed);
  double* values = params.data();
  for_each_active_range(
      params.partition(), spec.dropped,
      [&](std::size_t offset, std::size_t len) {
        for (std::size_t i = offset; i < offset + len; ++i) {
          values[i] += scale * stream.next();
        }
      });
}

SpsaResult spsa_projected_gradient(ParameterVector& params,
                                   const LossFunction& loss,
                                   const Batch& batch,
                                   const PerturbationSpec& spec) {
  SpsaResult result;

  const auto perturb = [&](double multiplier) {
    const auto t0 = Clock::now();
    perturb_parameters(params, spec, multiplier);
    result.perturb_ns += elapsed_ns(t0, Clock::now());
  };

  perturb(+1.0);  // theta + mu z
  double loss_plus;
  try {
    loss_plus = timed_forward(loss, params, batch, result.forward_ns);
  } catch (...) {
    perturb(-1.0);
    throw;
  }
  if (!std::isfinite(loss_plus)) {
    perturb(-1.0);
    throw numeric_error(loss.name() + ": non-finite loss at theta + mu z");
  }

  perturb(-2.0);  // theta - mu z
  double loss_minus;
  try {
    loss_minus = timed_forward(loss, params, batch, result.forward_ns);
  } catch (...) {
    perturb(+1.0);
    throw;
  }
  if (!std::isfinite(loss_minus)) {
    perturb(+1.0);
    throw numeric_error(loss.name() + ": non-finite loss at theta - mu z");
  }

  perturb(+1.0);  // restore

  result.loss_plus = loss_plus;
  result.loss_minus = loss_minus;
  result.projected_grad = (loss_plus - loss_minus) / (2.0 * spec.mu);
  return result;
}

namespace {

StepRecord sparse_step(ParameterVector& params, const LossFunction& loss,
                       const Batch& batch, const OptimizerConfig& config,
                       std::uint64_t t, bool select_layers) {
  config.validate();
  if (t >= config.steps) {
    throw std::invalid_argument("step index t must be < config.steps");
  }
  const std::size_t num_layers = params.partition().num_layers();
  if (select_layers && config.drop_count > num_layers) {
    throw std::invalid_argument("drop_count exceeds layer count");
  }

  AllocationLedger ledger;
  ledger.arm();

  const SeedSchedule seeds{config.base_seed};
  PerturbationSpec spec;
  spec.seed = seeds.derive(SeedPurpose::perturbation, t);
  spec.mu = config.mu;
  if (select_layers && config.drop_count > 0) {
    spec.dropped = select_dropped_layers(
        static_cast<std::uint32_t>(num_layers), config.drop_count,
        seeds.derive(SeedPurpose::layer_select, t));
  }

  SpsaResult spsa = spsa_projected_gradient(params, loss, batch, spec);

  // Update pass: reset to the same seed and walk the identical canonical
  // order, so every z_i matches the one used during perturbation.
  const auto t0 = Clock::now();
  const double step_scale = -config.learning_rate * spsa.projected_grad;
  {
    GaussianStream stream(spec.seed);
    double* values = params.data();
    for_each_active_range(params.partition(), spec.dropped,
                          [&](std::size_t offset, std::size_t len) {
                            for (std::size_t i = offset; i < offset + len;
                                 ++i) {
                              values[i] += step_scale * stream.next();
                            }
                          });
  }
  const std::uint64_t update_ns = elapsed_ns(t0, Clock::now());

  StepRecord record;
  record.step = t;
  record.loss_plus = spsa.loss_plus;
  record.loss_minus = spsa.loss_minus;
  record.projected_grad = spsa.projected_grad;
  record.dropped = std::move(spec.dropped);
  record.time_forward_ns = spsa.forward_ns;
  record.time_perturb_ns = spsa.perturb_ns;
  record.time_update_ns = update_ns;
  record.alloc_delta_bytes = ledger.read_delta();
  return record;
}

}  // namespace

StepRecord lezo_step(ParameterVector& params, const LossFunction& loss,
                     const Batch& batch, const OptimizerConfig& config,
                     std::uint64_t t) {
  return sparse_step(params, loss, batch, config, t, /*select_layers=*/true);
}

StepRecord mezo_step(ParameterVector& params, const LossFunction& loss,
                     const Batch& batch, const OptimizerConfig& config,
                     std::uint64_t t) {
  return sparse_step(params, loss, batch, config, t, /*select_layers=*/false);
}

std::vector<double> scatter_active(const LayerPartition& partition,
                                   std::span<const double> active_values,
                                   std::span<const std::uint32_t> dropped) {
  if (active_values.size() != partition.active_count(dropped)) {
    throw std::invalid_argument(
        "scatter_active: value count does not match active coordinate count");
  }
  std::vector<double> full(partition.total_len(), 0.0);
  std::size_t next = 0;
  for_each_active_range(partition, dropped,
                        [&](std::size_t offset, std::size_t len) {
                          for (std::size_t i = offset; i < offset + len; ++i) {
                            full[i] = active_values[next++];
                          }
                        });
  return full;
}

namespace {

// Central-difference scalar for an explicit direction, evaluated on copies.
double directional_quotient(const ParameterVector& params,
                            const LossFunction& loss, const Batch& batch,
                            double mu, std::span<const double> z_full) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("estimate_gradient: mu must be > 0");
  }
  std::vector<double> plus = snapshot(params);
  std::vector<double> minus = plus;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    plus[i] += mu * z_full[i];
    minus[i] -= mu * z_full[i];
  }
  const ParameterVector theta_plus(std::move(plus), params.partition());
  const ParameterVector theta_minus(std::move(minus), params.partition());
  const double loss_plus = loss.evaluate(theta_plus, batch);
  const double loss_minus = loss.evaluate(theta_minus, batch);
  if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus)) {
    throw numeric_error(loss.name() + ": non-finite loss in estimator");
  }
  return (loss_plus - loss_minus) / (2.0 * mu);
}

}  // namespace

std::vector<double> estimate_gradient_dense(const ParameterVector& params,
                                            const LossFunction& loss,
                                            const Batch& batch, double mu,
                                            std::span<const double> z) {
  if (z.size() != params.size()) {
    throw std::invalid_argument(
        "estimate_gradient_dense: z length must equal parameter count");
  }
  const double quotient = directional_quotient(params, loss, batch, mu, z);
  std::vector<double> grad(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) grad[i] = quotient * z[i];
  return grad;
}

std::vector<double> estimate_gradient_sparse(
    const ParameterVector& params, const LossFunction& loss,
    const Batch& batch, double mu, std::span<const double> z_active,
    std::span<const std::uint32_t> dropped_sorted) {
  validate_dropped(dropped_sorted, params.partition().num_layers());
  const std::vector<double> z_full =
      scatter_active(params.partition(), z_active, dropped_sorted);
  const double quotient = directional_quotient(params, loss, batch, mu, z_full);
  std::vector<double> grad(z_full.size());
  for (std::size_t i = 0; i < z_full.size(); ++i) {
    grad[i] = quotient * z_full[i];
  }
  return grad;
}

}  // namespace zoforge
