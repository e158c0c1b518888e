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

#include "zoforge/models/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zoforge/rng.hpp"

namespace zoforge {
namespace {

LayerPartition logistic_partition(std::size_t feature_dim,
                                  std::size_t num_classes,
                                  std::size_t layers) {
  if (feature_dim == 0 || num_classes == 0) {
    throw std::invalid_argument("make_logistic: sizes must be >= 1");
  }
  if (layers == 0 || layers > num_classes) {
    throw std::invalid_argument(
        "make_logistic: layers must be in [1, num_classes]");
  }
  // Split the C output rows into `layers` contiguous groups, sizes as even
  // as possible.
  std::vector<std::size_t> sizes;
  const std::size_t base = num_classes / layers;
  const std::size_t extra = num_classes % layers;
  for (std::size_t g = 0; g < layers; ++g) {
    const std::size_t rows = base + (g < extra ? 1 : 0);
    sizes.push_back(rows * feature_dim);
  }
  return build_partition(sizes, /*always_active_size=*/num_classes);
}

// Numerically stable log-sum-exp over logits.
double log_sum_exp(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - max_logit);
  return max_logit + std::log(acc);
}

}  // namespace

LogisticLoss::LogisticLoss(std::size_t feature_dim, std::size_t num_classes,
                           std::size_t layers, std::uint64_t seed)
    : LossFunction("logistic",
                   logistic_partition(feature_dim, num_classes, layers)),
      feature_dim_(feature_dim),
      num_classes_(num_classes),
      seed_(seed) {}

void LogisticLoss::logits_for_row(const ParameterVector& params,
                                  std::span<const double> features,
                                  std::span<double> logits) const {
  const double* theta = params.data();
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double acc = theta[c];  // bias
    const double* w = theta + weight_index(c, 0);
    for (std::size_t f = 0; f < feature_dim_; ++f) acc += w[f] * features[f];
    logits[c] = acc;
  }
}

double LogisticLoss::evaluate(const ParameterVector& params,
                              const Batch& batch) const {
  batch.validate();
  std::vector<double> logits(num_classes_);
  double total = 0.0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    logits_for_row(params, batch.row(r), logits);
    const int label = batch.labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
      throw std::invalid_argument("logistic: label out of range");
    }
    total += log_sum_exp(logits) - logits[label];
  }
  return total / static_cast<double>(batch.rows);
}

std::vector<double> LogisticLoss::analytic_gradient(
    const ParameterVector& params, const Batch& batch) const {
  batch.validate();
  std::vector<double> grad(dim(), 0.0);
  std::vector<double> logits(num_classes_);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const auto features = batch.row(r);
    logits_for_row(params, features, logits);
    const double lse = log_sum_exp(logits);
    for (std::size_t c = 0; c < num_classes_; ++c) {
      double delta = std::exp(logits[c] - lse);
      if (static_cast<std::size_t>(batch.labels[r]) == c) delta -= 1.0;
      delta *= inv_rows;
      grad[c] += delta;
      double* gw = grad.data() + weight_index(c, 0);
      for (std::size_t f = 0; f < feature_dim_; ++f) {
        gw[f] += delta * features[f];
      }
    }
  }
  return grad;
}

double LogisticLoss::accuracy(const ParameterVector& params,
                              const Batch& batch) const {
  batch.validate();
  std::vector<double> logits(num_classes_);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    logits_for_row(params, batch.row(r), logits);
    const std::size_t pred = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (pred == static_cast<std::size_t>(batch.labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.rows);
}

ParameterVector LogisticLoss::initial_parameters() const {
  GaussianStream stream(seed_);
  std::vector<double> values(dim());
  const double scale = 0.01;
  for (std::size_t i = num_classes_; i < values.size(); ++i) {
    values[i] = scale * stream.next();
  }
  return ParameterVector(std::move(values), partition());
}

std::unique_ptr<LogisticLoss> make_logistic(std::size_t feature_dim,
                                            std::size_t num_classes,
                                            std::size_t layers,
                                            std::uint64_t seed) {
  return std::make_unique<LogisticLoss>(feature_dim, num_classes, layers,
                                        seed);
}

}  // namespace zoforge
