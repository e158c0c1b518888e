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

// Linear softmax classifier, mean cross-entropy. The bias vector is the
// always-active segment; the weight matrix rows are grouped into `layers`
// contiguous output blocks, one partition layer each.
//
// Layout: [bias (C)] [W rows of block 0] [W rows of block 1] ...
class LogisticLoss final : public LossFunction {
 public:
  LogisticLoss(std::size_t feature_dim, std::size_t num_classes,
               std::size_t layers, std::uint64_t seed);

  double evaluate(const ParameterVector& params,
                  const Batch& batch) const override;
  std::vector<double> analytic_gradient(const ParameterVector& params,
                                        const Batch& batch) const override;
  ParameterVector initial_parameters() const override;
  bool is_classifier() const override { return true; }
  double accuracy(const ParameterVector& params,
                  const Batch& batch) const override;

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_classes() const { return num_classes_; }

 private:
  std::size_t weight_index(std::size_t cls, std::size_t feature) const {
    return num_classes_ + cls * feature_dim_ + feature;
  }
  void logits_for_row(const ParameterVector& params,
                      std::span<const double> features,
                      std::span<double> logits) const;

  std::size_t feature_dim_;
  std::size_t num_classes_;
  std::uint64_t seed_;
};

std::unique_ptr<LogisticLoss> make_logistic(std::size_t feature_dim,
                                            std::size_t num_classes,
                                            std::size_t layers,
                                            std::uint64_t seed);

}  // namespace zoforge
