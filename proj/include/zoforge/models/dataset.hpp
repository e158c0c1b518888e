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
#include <stdexcept>
#include <string>
#include <vector>

#include "zoforge/batch.hpp"

namespace zoforge {

enum class DatasetKind {
  synthetic_gaussian_blobs,
  synthetic_quadratic,
  csv_classification,
};

DatasetKind dataset_kind_from_string(const std::string& name);
std::string to_string(DatasetKind kind);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::synthetic_gaussian_blobs;
  std::size_t feature_dim = 1;
  std::size_t num_classes = 2;
  std::size_t num_samples = 1;
  std::uint64_t seed = 0;
  std::string path;  // csv kind only
  // Distance between blob class means, in units of the unit noise sigma.
  double separation = 6.0;
  double eval_fraction = 0.2;
};

struct Sample {
  std::vector<double> features;
  int label = 0;
};

struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> eval;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
};

// Malformed CSV input; carries the 0-indexed data row.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& message, std::size_t data_row)
      : std::runtime_error(message), data_row_(data_row) {}
  std::size_t data_row() const { return data_row_; }

 private:
  std::size_t data_row_;
};

// Deterministic generation/parsing and a seed-driven train/eval split.
// CSV header is either `label,f0,f1,...` (numeric features) or `label,text`
// (whitespace-tokenized into vocab ids, padded/truncated to feature_dim).
Dataset load_dataset(const DatasetSpec& spec);

// batch_size distinct rows, uniform without replacement, deterministic in
// (seed, step).
Batch sample_batch(const std::vector<Sample>& data, std::size_t batch_size,
                   std::uint64_t seed, std::uint64_t step);

// All rows in stored order; used for deterministic eval passes.
Batch full_batch(const std::vector<Sample>& data);

}  // namespace zoforge
