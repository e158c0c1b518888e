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

#include <cstdint>
#include <span>
#include <vector>

#include "zoforge/batch.hpp"
#include "zoforge/loss_function.hpp"
#include "zoforge/parameter_vector.hpp"
#include "zoforge/rng.hpp"

namespace zoforge {

// One perturbation pass, fully determined: stream seed, base scale mu, and
// the layer indices skipped this step (sorted ascending, unique).
struct PerturbationSpec {
  std::uint64_t seed = 0;
  double mu = 1e-3;
  std::vector<std::uint32_t> dropped;

  void validate(const LayerPartition& partition) const;
};

struct OptimizerConfig {
  double learning_rate = 1e-3;   // constant schedule
  double mu = 1e-3;              // perturbation scale
  std::uint64_t steps = 1;       // step budget T
  std::uint32_t drop_count = 0;  // layers dropped per step, n in [0, N]
  std::size_t batch_size = 1;
  std::uint64_t base_seed = 0;

  void validate() const;
};

// Everything observable about one optimizer step.
struct StepRecord {
  std::uint64_t step = 0;
  double loss_plus = 0.0;
  double loss_minus = 0.0;
  double projected_grad = 0.0;
  std::vector<std::uint32_t> dropped;
  std::uint64_t time_forward_ns = 0;
  std::uint64_t time_perturb_ns = 0;
  std::uint64_t time_update_ns = 0;
  std::uint64_t alloc_delta_bytes = 0;
};

struct SpsaResult {
  double projected_grad = 0.0;
  double loss_plus = 0.0;
  double loss_minus = 0.0;
  std::uint64_t forward_ns = 0;
  std::uint64_t perturb_ns = 0;
};

// Uniformly selects `drop_count` distinct layer indices out of
// [0, num_layers), deterministic in the seed; returned sorted ascending.
std::vector<std::uint32_t> select_dropped_layers(std::uint32_t num_layers,
                                                 std::uint32_t drop_count,
                                                 std::uint64_t seed);

// In-place theta_i += multiplier * mu * z_i over the active elements in
// canonical order, regenerating z from spec.seed. Dropped-layer elements are
// left bit-identical and consume no draws. No allocation proportional to the
// parameter count.
void perturb_parameters(ParameterVector& params, const PerturbationSpec& spec,
                        double multiplier = 1.0);

// Three-pass SPSA cycle (+mu, -2mu, +mu) with a forward pass after each of
// the first two; returns (l+ - l-)/(2 mu) and both losses. The parameters
// are restored (to rounding) on exit, including the error path: a failing or
// non-finite forward pass raises numeric_error only after the undo
// perturbations have run.
SpsaResult spsa_projected_gradient(ParameterVector& params,
                                   const LossFunction& loss,
                                   const Batch& batch,
                                   const PerturbationSpec& spec);

// One layer-wise sparse ZO-SGD step: per-step dropped-layer selection, the
// SPSA cycle, then the update pass which re-resets the stream to the same
// seed and walks the same canonical order applying
// theta_i -= lr * projected_grad * z_i.
StepRecord lezo_step(ParameterVector& params, const LossFunction& loss,
                     const Batch& batch, const OptimizerConfig& config,
                     std::uint64_t t);

// Dense ZO-SGD step: identical to lezo_step with an always-empty dropped
// set.
StepRecord mezo_step(ParameterVector& params, const LossFunction& loss,
                     const Batch& batch, const OptimizerConfig& config,
                     std::uint64_t t);

// Test-support estimators that materialize z explicitly and never mutate the
// input parameters.
std::vector<double> estimate_gradient_dense(const ParameterVector& params,
                                            const LossFunction& loss,
                                            const Batch& batch, double mu,
                                            std::span<const double> z);

// z_active carries one entry per active coordinate in canonical order; the
// returned gradient is exactly zero on dropped-layer coordinates.
std::vector<double> estimate_gradient_sparse(
    const ParameterVector& params, const LossFunction& loss,
    const Batch& batch, double mu, std::span<const double> z_active,
    std::span<const std::uint32_t> dropped_sorted);

// Expands per-active-coordinate values into a full-length vector (zeros on
// dropped layers), following the canonical order.
std::vector<double> scatter_active(const LayerPartition& partition,
                                   std::span<const double> active_values,
                                   std::span<const std::uint32_t> dropped);

}  // namespace zoforge
