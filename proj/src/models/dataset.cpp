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

#include "zoforge/models/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "zoforge/rng.hpp"

namespace zoforge {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double_field(const std::string& field, std::size_t data_row) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw parse_error("data row " + std::to_string(data_row) +
                          ": not a number: '" + field + "'",
                      data_row);
  }
  return value;
}

int parse_label_field(const std::string& field, std::size_t data_row) {
  const double v = parse_double_field(field, data_row);
  const int label = static_cast<int>(v);
  if (static_cast<double>(label) != v || label < 0) {
    throw parse_error("data row " + std::to_string(data_row) +
                          ": label must be a non-negative integer",
                      data_row);
  }
  return label;
}

Dataset split_by_seed(std::vector<Sample> samples, std::size_t feature_dim,
                      std::size_t num_classes, std::uint64_t seed,
                      double eval_fraction) {
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 gen(mix64(seed ^ 0xD1B54A32D192ED03ull));
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = bounded_u64(gen, i);
    std::swap(order[i - 1], order[j]);
  }
  std::size_t eval_count =
      static_cast<std::size_t>(eval_fraction * static_cast<double>(order.size()));
  eval_count = std::min(eval_count, order.size() > 1 ? order.size() - 1 : 0);

  Dataset out;
  out.feature_dim = feature_dim;
  out.num_classes = num_classes;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Sample& s = samples[order[i]];
    if (i < order.size() - eval_count) {
      out.train.push_back(std::move(s));
    } else {
      out.eval.push_back(std::move(s));
    }
  }
  return out;
}

Dataset make_blobs(const DatasetSpec& spec) {
  if (spec.feature_dim == 0 || spec.num_classes == 0 || spec.num_samples == 0) {
    throw std::invalid_argument("load_dataset: counts must be >= 1");
  }
  GaussianStream noise(mix64(spec.seed ^ 0xA0761D6478BD642Full));
  std::vector<Sample> samples(spec.num_samples);
  for (std::size_t i = 0; i < spec.num_samples; ++i) {
    const int label = static_cast<int>(i % spec.num_classes);
    Sample& s = samples[i];
    s.label = label;
    s.features.resize(spec.feature_dim);
    for (double& f : s.features) f = noise.next();
    // Class 0 sits at the origin; class c >= 1 at separation * e_{c-1}.
    // Minimum pairwise mean distance is `separation` (unit noise sigma).
    if (label > 0) {
      const std::size_t axis =
          static_cast<std::size_t>(label - 1) % spec.feature_dim;
      s.features[axis] += spec.separation;
    }
  }
  return split_by_seed(std::move(samples), spec.feature_dim, spec.num_classes,
                       spec.seed, spec.eval_fraction);
}

Dataset make_quadratic_placeholder(const DatasetSpec& spec) {
  // Quadratic objectives ignore the batch; generate inert rows so the
  // training loop machinery stays uniform.
  std::vector<Sample> samples(spec.num_samples);
  for (Sample& s : samples) {
    s.label = 0;
    s.features.assign(spec.feature_dim, 0.0);
  }
  Dataset out;
  out.feature_dim = spec.feature_dim;
  out.num_classes = 1;
  out.train = samples;
  out.eval = std::move(samples);
  return out;
}

Dataset load_csv(const DatasetSpec& spec) {
  if (spec.path.empty()) {
    throw std::invalid_argument("load_dataset: csv kind requires a path");
  }
  std::ifstream in(spec.path);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open " + spec.path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_dataset: " + spec.path + " is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "label") {
    throw std::runtime_error(
        "load_dataset: header must be 'label,f0,...' or 'label,text'");
  }
  const bool text_mode = header.size() == 2 && header[1] == "text";
  const std::size_t num_features = header.size() - 1;
  const std::size_t feature_dim = text_mode ? spec.feature_dim : num_features;
  if (text_mode && feature_dim == 0) {
    throw std::invalid_argument(
        "load_dataset: text mode requires feature_dim (target token count)");
  }

  std::map<std::string, int> vocab_ids;  // encounter order; 0 is padding
  int next_id = 1;
  std::vector<Sample> samples;
  int max_label = 0;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++data_row;
      continue;
    }
    Sample s;
    if (text_mode) {
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) {
        throw parse_error(
            "data row " + std::to_string(data_row) + ": expected 2 fields",
            data_row);
      }
      s.label = parse_label_field(line.substr(0, comma), data_row);
      std::stringstream words(line.substr(comma + 1));
      std::string word;
      s.features.assign(feature_dim, 0.0);
      std::size_t pos = 0;
      while (words >> word && pos < feature_dim) {
        auto [it, inserted] = vocab_ids.try_emplace(word, next_id);
        if (inserted) ++next_id;
        s.features[pos++] = static_cast<double>(it->second);
      }
    } else {
      const std::vector<std::string> fields = split_csv_line(line);
      if (fields.size() != header.size()) {
        throw parse_error("data row " + std::to_string(data_row) +
                              ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()),
                          data_row);
      }
      s.label = parse_label_field(fields[0], data_row);
      s.features.resize(num_features);
      for (std::size_t f = 0; f < num_features; ++f) {
        s.features[f] = parse_double_field(fields[f + 1], data_row);
      }
    }
    max_label = std::max(max_label, s.label);
    samples.push_back(std::move(s));
    ++data_row;
  }
  if (samples.empty()) {
    throw std::runtime_error("load_dataset: " + spec.path + " has no rows");
  }
  const std::size_t num_classes =
      std::max<std::size_t>(spec.num_classes, max_label + 1);
  return split_by_seed(std::move(samples), feature_dim, num_classes, spec.seed,
                       spec.eval_fraction);
}

}  // namespace

DatasetKind dataset_kind_from_string(const std::string& name) {
  if (name == "synthetic_gaussian_blobs") {
    return DatasetKind::synthetic_gaussian_blobs;
  }
  if (name == "synthetic_quadratic") return DatasetKind::synthetic_quadratic;
  if (name == "csv_classification") return DatasetKind::csv_classification;
  throw std::invalid_argument("unknown dataset kind: " + name);
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::synthetic_gaussian_blobs:
      return "synthetic_gaussian_blobs";
    case DatasetKind::synthetic_quadratic:
      return "synthetic_quadratic";
    case DatasetKind::csv_classification:
      return "csv_classification";
  }
  return "unknown";
}

Dataset load_dataset(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::synthetic_gaussian_blobs:
      return make_blobs(spec);
    case DatasetKind::synthetic_quadratic:
      return make_quadratic_placeholder(spec);
    case DatasetKind::csv_classification:
      return load_csv(spec);
  }
  throw std::invalid_argument("load_dataset: unknown kind");
}

Batch sample_batch(const std::vector<Sample>& data, std::size_t batch_size,
                   std::uint64_t seed, std::uint64_t step) {
  if (data.empty()) {
    throw std::invalid_argument("sample_batch: empty dataset");
  }
  if (batch_size == 0 || batch_size > data.size()) {
    throw std::invalid_argument(
        "sample_batch: batch_size must be in [1, dataset size]");
  }
  // Partial Fisher-Yates for a uniform without-replacement draw.
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 gen(derive_seed(seed, SeedPurpose::batch_sample, step));
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j = i + bounded_u64(gen, order.size() - i);
    std::swap(order[i], order[j]);
  }

  Batch batch;
  batch.rows = batch_size;
  batch.feature_dim = data[0].features.size();
  batch.inputs.resize(batch_size * batch.feature_dim);
  batch.labels.resize(batch_size);
  for (std::size_t r = 0; r < batch_size; ++r) {
    const Sample& s = data[order[r]];
    std::copy(s.features.begin(), s.features.end(),
              batch.inputs.begin() + r * batch.feature_dim);
    batch.labels[r] = s.label;
  }
  return batch;
}

Batch full_batch(const std::vector<Sample>& data) {
  if (data.empty()) {
    throw std::invalid_argument("full_batch: empty dataset");
  }
  Batch batch;
  batch.rows = data.size();
  batch.feature_dim = data[0].features.size();
  batch.inputs.resize(batch.rows * batch.feature_dim);
  batch.labels.resize(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    std::copy(data[r].features.begin(), data[r].features.end(),
              batch.inputs.begin() + r * batch.feature_dim);
    batch.labels[r] = data[r].label;
  }
  return batch;
}

}  // namespace zoforge
