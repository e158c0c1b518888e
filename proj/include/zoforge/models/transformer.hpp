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

// Single-stack transformer encoder classifier: token + position embeddings,
// `blocks` pre-norm encoder blocks (2-head self-attention, GELU feed-forward
// with expansion 4, residual connections, layer norm), mean pooling, linear
// head, mean cross-entropy.
//
// Each block is one partition layer; embeddings and head are always-active.
// Inputs are token ids (stored as doubles), feature_dim = seq_len.
class TransformerLoss final : public LossFunction {
 public:
  TransformerLoss(std::size_t vocab, std::size_t seq_len, std::size_t dim,
                  std::size_t blocks, std::size_t num_classes,
                  std::uint64_t seed);

  double evaluate(const ParameterVector& params,
                  const Batch& batch) const override;
  std::vector<double> analytic_gradient(const ParameterVector& params,
                                        const Batch& batch) const override;
  ParameterVector initial_parameters() const override;
  bool is_classifier() const override { return true; }
  double accuracy(const ParameterVector& params,
                  const Batch& batch) const override;

  std::size_t vocab() const { return vocab_; }
  std::size_t seq_len() const { return seq_len_; }
  std::size_t embed_dim() const { return dim_; }
  std::size_t blocks() const { return blocks_; }

  static constexpr std::size_t kNumHeads = 2;
  static constexpr std::size_t kFfExpansion = 4;

  // Per-block parameter count: two layer norms, fused q/k/v/out projections,
  // and the two feed-forward matrices with biases.
  static std::size_t block_param_count(std::size_t dim) {
    return 12 * dim * dim + 13 * dim;
  }

 private:
  struct Scratch;
  struct Cache;

  void forward_sample(const ParameterVector& params,
                      std::span<const double> tokens, int label,
                      Scratch& scratch, Cache* cache, double& loss_out,
                      std::size_t& pred_out) const;
  void backward_sample(const ParameterVector& params, const Cache& cache,
                       int label, double inv_rows,
                       std::vector<double>& grad) const;

  std::size_t vocab_;
  std::size_t seq_len_;
  std::size_t dim_;
  std::size_t blocks_;
  std::size_t num_classes_;
  std::uint64_t seed_;
};

std::unique_ptr<TransformerLoss> make_tiny_transformer(
    std::size_t vocab, std::size_t seq_len, std::size_t dim,
    std::size_t blocks, std::size_t num_classes, std::uint64_t seed);

}  // namespace zoforge
