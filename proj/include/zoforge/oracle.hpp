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
#include <functional>
#include <span>
#include <vector>

#include "zoforge/engine.hpp"
#include "zoforge/loss_function.hpp"
#include "zoforge/models/quadratic.hpp"

namespace zoforge::oracle {

using BatchProvider = std::function<Batch(std::uint64_t step)>;

// Re-implements the sparse ZO-SGD step with z materialized as an explicit
// full vector and the update computed by plain vector algebra, instead of
// the engine's in-place seed-replay passes. Consumes the same derived seeds
// and layer selections as the engine, so trajectories are directly
// comparable. Returns the parameter snapshot after each step.
std::vector<std::vector<double>> explicit_z_replay(
    const LossFunction& loss, ParameterVector theta,
    const OptimizerConfig& config, std::uint64_t steps,
    const BatchProvider& batch_at);

// Central differences per coordinate with step h * (1 + |theta_i|).
std::vector<double> finite_difference_gradient(const LossFunction& loss,
                                               const ParameterVector& theta,
                                               const Batch& batch, double h);

// Same, restricted to the given coordinates (for large models).
std::vector<double> finite_difference_gradient_at(
    const LossFunction& loss, const ParameterVector& theta, const Batch& batch,
    double h, std::span<const std::size_t> coords);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
  bool passed = false;
};

// Compares the model's analytic gradient against finite differences on
// `probes` seeded random (theta, batch) pairs. When coords_per_probe > 0
// only that many sampled coordinates are differenced per probe.
GradCheckReport check_gradients(const LossFunction& loss, const Batch& batch,
                                std::size_t probes, double tolerance,
                                std::uint64_t seed,
                                std::size_t coords_per_probe = 0);

struct UnbiasednessResult {
  std::vector<double> empirical_mean;
  double rel_error = 0.0;
};

// Monte-Carlo mean of `num_estimates` sparse SPSA estimates against the
// sparse analytic gradient (zeros on dropped layers). Requires a quadratic
// objective so the smoothed gradient equals the true gradient and the test
// is exact in expectation. Throws on a zero sparse gradient (pick theta away
// from the optimum).
UnbiasednessResult unbiasedness_test(const QuadraticLoss& loss,
                                     const ParameterVector& theta,
                                     std::span<const std::uint32_t> dropped,
                                     std::size_t num_estimates, double mu,
                                     std::uint64_t seed);

// Plain gradient descent on the analytic gradient, constant learning rate.
std::vector<std::vector<double>> fo_sgd_baseline(const LossFunction& loss,
                                                 ParameterVector theta,
                                                 double learning_rate,
                                                 std::uint64_t steps,
                                                 const BatchProvider& batch_at);

struct ConvergenceTrial {
  std::size_t dim = 0;
  std::size_t active_dim = 0;  // kept coordinates per step
  double keep_fraction = 1.0;
  double threshold = 0.0;  // target on the true squared gradient norm
  std::uint64_t steps_to_threshold = 0;
  double learning_rate = 0.0;
  double mu = 0.0;
  std::size_t repeat_index = 0;
  bool converged = false;
};

struct SweepOptions {
  std::size_t layers = 8;
  double mu = 1e-3;
  double theta0_norm = 10.0;
  std::uint64_t max_steps = 2000000;
};

// Steps-to-threshold harness on cond=1 quadratics: for each (d, keep)
// cell runs the sparse optimizer with the schedule
// lr = 1 / (4 (active_dim + 4) L) until the true squared gradient norm
// falls below `threshold`, `repeats` times with distinct seeds. Exhausting
// max_steps marks the trial non-converged instead of throwing.
std::vector<ConvergenceTrial> convergence_scaling_sweep(
    std::span<const std::size_t> d_list, std::span<const double> keep_fractions,
    double threshold, std::size_t repeats, std::uint64_t seed,
    const SweepOptions& options = {});

double mean_steps(std::span<const ConvergenceTrial> trials, std::size_t dim,
                  double keep_fraction);

// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(std::span<const double> x,
                                 std::span<const double> y);

}  // namespace zoforge::oracle
