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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "zoforge/models/dataset.hpp"

using namespace zoforge;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/zoforge_test_" + name + ".csv";
  std::ofstream out(path, std::ios::trunc);
  out << body;
  return path;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("blobs are deterministic in the spec seed") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 4;
  spec.num_classes = 2;
  spec.num_samples = 40;
  spec.seed = 99;
  const Dataset a = load_dataset(spec);
  const Dataset b = load_dataset(spec);
  REQUIRE(a.train.size() == b.train.size());
  REQUIRE(a.eval.size() == b.eval.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].features == b.train[i].features);
    CHECK(a.train[i].label == b.train[i].label);
  }
  CHECK(a.train.size() + a.eval.size() == 40);
}

TEST_CASE("blob class means are separated as configured") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 3;
  spec.num_classes = 2;
  spec.num_samples = 4000;
  spec.seed = 5;
  spec.separation = 6.0;
  spec.eval_fraction = 0.0;
  const Dataset data = load_dataset(spec);
  double mean0 = 0.0, mean1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  for (const Sample& s : data.train) {
    if (s.label == 0) {
      mean0 += s.features[0];
      ++n0;
    } else {
      mean1 += s.features[0];
      ++n1;
    }
  }
  mean0 /= static_cast<double>(n0);
  mean1 /= static_cast<double>(n1);
  CHECK(std::abs(mean1 - mean0 - 6.0) < 0.2);  // noise is unit sigma
}

TEST_CASE("csv parse error names the 0-indexed data row") {
  const std::string path = write_temp_csv("malformed",
                                          "label,f0,f1\n"
                                          "0,1.5,2.5\n"
                                          "1,0.25,-1\n"
                                          "0,oops,3\n");
  DatasetSpec spec;
  spec.kind = DatasetKind::csv_classification;
  spec.path = path;
  try {
    load_dataset(spec);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.data_row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv numeric mode round-trips values") {
  const std::string path = write_temp_csv("numeric",
                                          "label,f0,f1\n"
                                          "0,1.5,2.5\n"
                                          "1,-3,4\n"
                                          "1,0,0.125\n"
                                          "0,2,2\n"
                                          "1,7,-7\n");
  DatasetSpec spec;
  spec.kind = DatasetKind::csv_classification;
  spec.path = path;
  spec.seed = 3;
  spec.eval_fraction = 0.2;
  const Dataset data = load_dataset(spec);
  CHECK(data.feature_dim == 2);
  CHECK(data.num_classes == 2);
  CHECK(data.train.size() + data.eval.size() == 5);
  CHECK(data.eval.size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("csv text mode tokenizes into stable vocab ids") {
  const std::string path = write_temp_csv("text",
                                          "label,text\n"
                                          "0,the cat sat\n"
                                          "1,the dog ran far\n"
                                          "0,cat cat cat\n");
  DatasetSpec spec;
  spec.kind = DatasetKind::csv_classification;
  spec.path = path;
  spec.feature_dim = 4;  // pad/truncate to 4 tokens
  spec.eval_fraction = 0.0;
  const Dataset data = load_dataset(spec);
  REQUIRE(data.train.size() == 3);
  CHECK(data.feature_dim == 4);
  // Ids assigned in encounter order: the=1 cat=2 sat=3 dog=4 ran=5 far=6.
  // The split may reorder rows, so locate rows by label and first id.
  std::set<std::vector<double>> rows;
  for (const Sample& s : data.train) rows.insert(s.features);
  CHECK(rows.count({1, 2, 3, 0}) == 1);
  CHECK(rows.count({1, 4, 5, 6}) == 1);
  CHECK(rows.count({2, 2, 2, 0}) == 1);
  std::remove(path.c_str());
}

TEST_CASE("csv requires a path") {
  DatasetSpec spec;
  spec.kind = DatasetKind::csv_classification;
  CHECK_THROWS_AS(load_dataset(spec), std::invalid_argument);
}

TEST_CASE("unknown dataset kind") {
  CHECK_THROWS_AS(dataset_kind_from_string("csvv"), std::invalid_argument);
  CHECK(dataset_kind_from_string("synthetic_quadratic") ==
        DatasetKind::synthetic_quadratic);
}

TEST_CASE("full-size sample is a permutation of the dataset") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 2;
  spec.num_classes = 2;
  spec.num_samples = 16;
  spec.seed = 1;
  spec.eval_fraction = 0.0;
  const Dataset data = load_dataset(spec);
  const Batch batch = sample_batch(data.train, data.train.size(), 4, 0);
  std::multiset<double> batch_firsts, data_firsts;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    batch_firsts.insert(batch.inputs[r * batch.feature_dim]);
  }
  for (const Sample& s : data.train) data_firsts.insert(s.features[0]);
  CHECK(batch_firsts == data_firsts);
}

TEST_CASE("sample_batch is deterministic in (seed, step)") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 2;
  spec.num_classes = 2;
  spec.num_samples = 32;
  spec.seed = 2;
  const Dataset data = load_dataset(spec);
  const Batch a = sample_batch(data.train, 8, 7, 3);
  const Batch b = sample_batch(data.train, 8, 7, 3);
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
  const Batch c = sample_batch(data.train, 8, 7, 4);
  CHECK(a.inputs != c.inputs);
}

TEST_CASE("sample_batch frequencies are uniform over steps") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 1;
  spec.num_classes = 2;
  spec.num_samples = 20;
  spec.seed = 11;
  spec.eval_fraction = 0.0;
  const Dataset data = load_dataset(spec);
  REQUIRE(data.train.size() == 20);

  // Identify rows by their unique noise value.
  std::vector<double> keys;
  for (const Sample& s : data.train) keys.push_back(s.features[0]);

  const std::size_t steps = 10000;
  const std::size_t batch_size = 5;
  std::vector<std::size_t> counts(20, 0);
  for (std::size_t t = 0; t < steps; ++t) {
    const Batch batch = sample_batch(data.train, batch_size, 13, t);
    for (std::size_t r = 0; r < batch.rows; ++r) {
      const double v = batch.inputs[r];
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i] == v) {
          ++counts[i];
          break;
        }
      }
    }
  }
  const double p = static_cast<double>(batch_size) / 20.0;
  const double expected = static_cast<double>(steps) * p;
  const double sigma =
      std::sqrt(static_cast<double>(steps) * p * (1.0 - p));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    CHECK(std::abs(static_cast<double>(counts[i]) - expected) <=
          3.0 * sigma);
  }
}

TEST_CASE("sample_batch validates the batch size") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_gaussian_blobs;
  spec.feature_dim = 1;
  spec.num_classes = 2;
  spec.num_samples = 8;
  spec.eval_fraction = 0.0;
  const Dataset data = load_dataset(spec);
  CHECK_THROWS_AS(sample_batch(data.train, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_batch(data.train, 9, 1, 0), std::invalid_argument);
}

TEST_CASE("quadratic placeholder dataset is inert") {
  DatasetSpec spec;
  spec.kind = DatasetKind::synthetic_quadratic;
  spec.feature_dim = 1;
  spec.num_samples = 4;
  const Dataset data = load_dataset(spec);
  CHECK(data.train.size() == 4);
  CHECK(data.eval.size() == 4);
}

}  // TEST_SUITE
