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
#include <memory>

#include "zoforge/loss_function.hpp"

namespace zoforge {

// Two-layer tanh MLP with mean cross-entropy. Each weight matrix together
// with its bias forms one partition layer (N = 2); nothing is always-active.
//
// Layout: [W1 (H x F) row-major, b1 (H)] [W2 (C x H) row-major, b2 (C)]
class MlpLoss final : public LossFunction {
 public:
  MlpLoss(std::size_t feature_dim, std::size_t hidden, std::size_t num_classes,
          std::uint64_t seed);

  double evaluate(const ParameterVector& params,
                  const Batch& batch) const override;
  std::vector<double> analytic_gradient(const ParameterVector& params,
                                        const Batch& batch) const override;
  ParameterVector initial_parameters() const override;
  bool is_classifier() const override { return true; }
  double accuracy(const ParameterVector& params,
                  const Batch& batch) const override;

 private:
  struct Offsets {
    std::size_t w1, b1, w2, b2;
  };
  Offsets offsets() const;
  void forward_row(const ParameterVector& params,
                   std::span<const double> features, std::span<double> hidden,
                   std::span<double> logits) const;

  std::size_t feature_dim_;
  std::size_t hidden_;
  std::size_t num_classes_;
  std::uint64_t seed_;
};

std::unique_ptr<MlpLoss> make_mlp(std::size_t feature_dim, std::size_t hidden,
                                  std::size_t num_classes, std::uint64_t seed);

}  // namespace zoforge
