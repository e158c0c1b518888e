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

#include "zoforge/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zoforge/rng.hpp"

namespace zoforge {
namespace {

LayerPartition mlp_partition(std::size_t feature_dim, std::size_t hidden,
                             std::size_t num_classes) {
  if (feature_dim == 0 || hidden == 0 || num_classes == 0) {
    throw std::invalid_argument("make_mlp: sizes must be >= 1");
  }
  const std::size_t layer1 = hidden * feature_dim + hidden;
  const std::size_t layer2 = num_classes * hidden + num_classes;
  return build_partition({layer1, layer2}, /*always_active_size=*/0);
}

double log_sum_exp(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - max_logit);
  return max_logit + std::log(acc);
}

}  // namespace

MlpLoss::MlpLoss(std::size_t feature_dim, std::size_t hidden,
                 std::size_t num_classes, std::uint64_t seed)
    : LossFunction("mlp", mlp_partition(feature_dim, hidden, num_classes)),
      feature_dim_(feature_dim),
      hidden_(hidden),
      num_classes_(num_classes),
      seed_(seed) {}

MlpLoss::Offsets MlpLoss::offsets() const {
  const std::size_t w1 = 0;
  const std::size_t b1 = hidden_ * feature_dim_;
  const std::size_t w2 = b1 + hidden_;
  const std::size_t b2 = w2 + num_classes_ * hidden_;
  return {w1, b1, w2, b2};
}

void MlpLoss::forward_row(const ParameterVector& params,
                          std::span<const double> features,
                          std::span<double> hidden,
                          std::span<double> logits) const {
  const double* theta = params.data();
  const Offsets off = offsets();
  for (std::size_t h = 0; h < hidden_; ++h) {
    double acc = theta[off.b1 + h];
    const double* w = theta + off.w1 + h * feature_dim_;
    for (std::size_t f = 0; f < feature_dim_; ++f) acc += w[f] * features[f];
    hidden[h] = std::tanh(acc);
  }
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double acc = theta[off.b2 + c];
    const double* w = theta + off.w2 + c * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) acc += w[h] * hidden[h];
    logits[c] = acc;
  }
}

double MlpLoss::evaluate(const ParameterVector& params,
                         const Batch& batch) const {
  batch.validate();
  std::vector<double> hidden(hidden_);
  std::vector<double> logits(num_classes_);
  double total = 0.0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_row(params, batch.row(r), hidden, logits);
    const int label = batch.labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
      throw std::invalid_argument("mlp: label out of range");
    }
    total += log_sum_exp(logits) - logits[label];
  }
  return total / static_cast<double>(batch.rows);
}

std::vector<double> MlpLoss::analytic_gradient(const ParameterVector& params,
                                               const Batch& batch) const {
  batch.validate();
  const Offsets off = offsets();
  const double* theta = params.data();
  std::vector<double> grad(dim(), 0.0);
  std::vector<double> hidden(hidden_);
  std::vector<double> logits(num_classes_);
  std::vector<double> dlogits(num_classes_);
  std::vector<double> dhidden(hidden_);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows);

  for (std::size_t r = 0; r < batch.rows; ++r) {
    const auto features = batch.row(r);
    forward_row(params, features, hidden, logits);
    const double lse = log_sum_exp(logits);
    for (std::size_t c = 0; c < num_classes_; ++c) {
      dlogits[c] = std::exp(logits[c] - lse) * inv_rows;
    }
    dlogits[batch.labels[r]] -= inv_rows;

    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (std::size_t c = 0; c < num_classes_; ++c) {
      grad[off.b2 + c] += dlogits[c];
      const double* w2 = theta + off.w2 + c * hidden_;
      double* gw2 = grad.data() + off.w2 + c * hidden_;
      for (std::size_t h = 0; h < hidden_; ++h) {
        gw2[h] += dlogits[c] * hidden[h];
        dhidden[h] += dlogits[c] * w2[h];
      }
    }
    for (std::size_t h = 0; h < hidden_; ++h) {
      const double dpre = dhidden[h] * (1.0 - hidden[h] * hidden[h]);
      grad[off.b1 + h] += dpre;
      double* gw1 = grad.data() + off.w1 + h * feature_dim_;
      for (std::size_t f = 0; f < feature_dim_; ++f) {
        gw1[f] += dpre * features[f];
      }
    }
  }
  return grad;
}

double MlpLoss::accuracy(const ParameterVector& params,
                         const Batch& batch) const {
  batch.validate();
  std::vector<double> hidden(hidden_);
  std::vector<double> logits(num_classes_);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_row(params, batch.row(r), hidden, logits);
    const std::size_t pred = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (pred == static_cast<std::size_t>(batch.labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.rows);
}

ParameterVector MlpLoss::initial_parameters() const {
  GaussianStream stream(seed_);
  const Offsets off = offsets();
  std::vector<double> values(dim(), 0.0);
  const double scale1 = 1.0 / std::sqrt(static_cast<double>(feature_dim_));
  const double scale2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (std::size_t i = off.w1; i < off.b1; ++i) values[i] = scale1 * stream.next();
  for (std::size_t i = off.w2; i < off.b2; ++i) values[i] = scale2 * stream.next();
  return ParameterVector(std::move(values), partition());
}

std::unique_ptr<MlpLoss> make_mlp(std::size_t feature_dim, std::size_t hidden,
                                  std::size_t num_classes,
                                  std::uint64_t seed) {
  return std::make_unique<MlpLoss>(feature_dim, hidden, num_classes, seed);
}

}  // namespace zoforge
