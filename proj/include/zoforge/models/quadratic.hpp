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
#include <vector>

#include "zoforge/loss_function.hpp"

namespace zoforge {

// L(theta) = 1/2 theta^T A theta with A diagonal positive definite,
// eigenvalues log-spaced in [1, condition_number] by index. Batches are
// ignored. Smoothness constant equals the largest eigenvalue.
class QuadraticLoss final : public LossFunction {
 public:
  QuadraticLoss(std::size_t dim, std::size_t layers, double condition_number,
                std::uint64_t seed);

  double evaluate(const ParameterVector& params,
                  const Batch& batch) const override;
  std::vector<double> analytic_gradient(const ParameterVector& params,
                                        const Batch& batch) const override;
  ParameterVector initial_parameters() const override;

  const std::vector<double>& hessian_diagonal() const { return eigenvalues_; }
  double max_eigenvalue() const { return eigenvalues_.back(); }

 private:
  std::vector<double> eigenvalues_;
  std::uint64_t seed_;
};

// layers evenly sized; any remainder of dim goes to the always-active
// segment (placed first).
std::unique_ptr<QuadraticLoss> make_quadratic(std::size_t dim,
                                              std::size_t layers,
                                              double condition_number,
                                              std::uint64_t seed);

}  // namespace zoforge
