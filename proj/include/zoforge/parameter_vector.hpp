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

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zoforge/partition.hpp"

namespace zoforge {

// Flat parameter store with its layer partition. The single mutable state of
// an optimization run: exactly one step may mutate it at a time.
class ParameterVector {
 public:
  ParameterVector() = default;

  ParameterVector(std::vector<double> values, LayerPartition partition)
      : values_(std::move(values)), partition_(std::move(partition)) {
    if (values_.size() != partition_.total_len()) {
      throw std::invalid_argument(
          "ParameterVector: value count does not match partition total_len");
    }
  }

  std::size_t size() const { return values_.size(); }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> view() const { return values_; }
  std::span<double> view() { return values_; }

  const LayerPartition& partition() const { return partition_; }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  std::vector<double> values_;
  LayerPartition partition_;
};

// Value copy of the parameters; test support only, never used inside an
// optimization step.
inline std::vector<double> snapshot(const ParameterVector& pv) {
  return std::vector<double>(pv.data(), pv.data() + pv.size());
}

}  // namespace zoforge
