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

#include "zoforge/models/quadratic.hpp"

#include <cmath>
#include <stdexcept>

#include "zoforge/rng.hpp"

namespace zoforge {
namespace {

LayerPartition quadratic_partition(std::size_t dim, std::size_t layers) {
  if (dim == 0) throw std::invalid_argument("make_quadratic: dim must be > 0");
  if (layers > dim) {
    throw std::invalid_argument("make_quadratic: more layers than parameters");
  }
  std::size_t per_layer = layers > 0 ? dim / layers : 0;
  std::size_t remainder = layers > 0 ? dim % layers : dim;
  std::vector<std::size_t> sizes(layers, per_layer);
  return build_partition(sizes, remainder);
}

}  // namespace

QuadraticLoss::QuadraticLoss(std::size_t dim, std::size_t layers,
                             double condition_number, std::uint64_t seed)
    : LossFunction("quadratic", quadratic_partition(dim, layers)),
      seed_(seed) {
  if (!(condition_number >= 1.0)) {
    throw std::invalid_argument("make_quadratic: condition_number must be >= 1");
  }
  eigenvalues_.resize(dim);
  const double log_cond = std::log(condition_number);
  const double denom = dim > 1 ? static_cast<double>(dim - 1) : 1.0;
  for (std::size_t i = 0; i < dim; ++i) {
    eigenvalues_[i] = std::exp(log_cond * static_cast<double>(i) / denom);
  }
}

double QuadraticLoss::evaluate(const ParameterVector& params,
                               const Batch&) const {
  const double* theta = params.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
    acc += eigenvalues_[i] * theta[i] * theta[i];
  }
  return 0.5 * acc;
}

std::vector<double> QuadraticLoss::analytic_gradient(
    const ParameterVector& params, const Batch&) const {
  std::vector<double> grad(eigenvalues_.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = eigenvalues_[i] * params[i];
  }
  return grad;
}

ParameterVector QuadraticLoss::initial_parameters() const {
  GaussianStream stream(seed_);
  std::vector<double> values(eigenvalues_.size());
  for (double& v : values) v = stream.next();
  return ParameterVector(std::move(values), partition());
}

std::unique_ptr<QuadraticLoss> make_quadratic(std::size_t dim,
                                              std::size_t layers,
                                              double condition_number,
                                              std::uint64_t seed) {
  return std::make_unique<QuadraticLoss>(dim, layers, condition_number, seed);
}

}  // namespace zoforge
