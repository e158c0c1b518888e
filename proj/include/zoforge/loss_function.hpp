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

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoforge/batch.hpp"
#include "zoforge/parameter_vector.hpp"
#include "zoforge/partition.hpp"

namespace zoforge {

// Raised when a forward pass produces a non-finite loss or a numeric
// precondition fails mid-computation.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Forward-only objective L(theta; batch) -> scalar. Evaluation is
// deterministic (equal inputs give bit-equal losses) and never mutates the
// parameters. The analytic gradient exists for oracle verification only; the
// optimizer path must not call it.
class LossFunction {
 public:
  virtual ~LossFunction() = default;

  virtual double evaluate(const ParameterVector& params,
                          const Batch& batch) const = 0;

  // Hand-derived exact gradient, exported to the oracle module.
  virtual std::vector<double> analytic_gradient(const ParameterVector& params,
                                                const Batch& batch) const = 0;

  // Seeded initial parameters; identical on every call.
  virtual ParameterVector initial_parameters() const = 0;

  const LayerPartition& partition() const { return partition_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return partition_.total_len(); }
  std::size_t num_layers() const { return partition_.num_layers(); }

  virtual bool is_classifier() const { return false; }

  // Fraction of rows classified correctly; only valid for classifiers.
  virtual double accuracy(const ParameterVector&, const Batch&) const {
    throw std::logic_error(name_ + ": accuracy is undefined for this loss");
  }

 protected:
  LossFunction(std::string name, LayerPartition partition)
      : name_(std::move(name)), partition_(std::move(partition)) {}

 private:
  std::string name_;
  LayerPartition partition_;
};

}  // namespace zoforge
