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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace zoforge {

// Mini-batch of samples: row-major inputs (rows x feature_dim) plus one
// class label per row. Token inputs store ids as doubles.
struct Batch {
  std::size_t rows = 0;
  std::size_t feature_dim = 0;
  std::vector<double> inputs;
  std::vector<int> labels;

  std::span<const double> row(std::size_t r) const {
    return {inputs.data() + r * feature_dim, feature_dim};
  }

  void validate() const {
    if (rows == 0) throw std::invalid_argument("Batch: rows must be >= 1");
    if (inputs.size() != rows * feature_dim) {
      throw std::invalid_argument("Batch: input size mismatch");
    }
    if (labels.size() != rows) {
      throw std::invalid_argument("Batch: label count must equal row count");
    }
  }
};

}  // namespace zoforge
