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

#include "zoforge/partition.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace zoforge {

LayerPartition::LayerPartition(std::vector<IndexRange> always_active,
                               std::vector<IndexRange> layers)
    : always_active_(std::move(always_active)), layers_(std::move(layers)) {
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (layers_[i - 1].offset >= layers_[i].offset) {
      throw std::invalid_argument(
          "LayerPartition: layers must be ordered by ascending offset");
    }
  }

  // Disjointness and coverage: sorted by offset, the ranges must tile
  // [0, total) with no gap and no overlap.
  std::vector<IndexRange> all;
  all.reserve(always_active_.size() + layers_.size());
  all.insert(all.end(), always_active_.begin(), always_active_.end());
  all.insert(all.end(), layers_.begin(), layers_.end());
  std::sort(all.begin(), all.end(),
            [](const IndexRange& a, const IndexRange& b) {
              return a.offset < b.offset;
            });
  std::size_t expected = 0;
  for (const IndexRange& r : all) {
    if (r.len == 0) {
      throw std::invalid_argument("LayerPartition: empty range");
    }
    if (r.offset != expected) {
      throw std::invalid_argument(
          "LayerPartition: ranges must tile [0, d) without gaps or overlap");
    }
    expected = r.offset + r.len;
  }
  total_len_ = expected;
}

std::size_t LayerPartition::active_count(
    std::span<const std::uint32_t> dropped_sorted) const {
  std::size_t count = total_len_;
  for (std::uint32_t li : dropped_sorted) {
    count -= layers_[li].len;
  }
  return count;
}

LayerPartition build_partition(const std::vector<std::size_t>& layer_sizes,
                               std::size_t always_active_size) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = always_active_size;
  for (std::size_t s : layer_sizes) {
    if (s == 0) {
      throw std::invalid_argument("build_partition: layer size must be > 0");
    }
    if (s > kMax - total) {
      throw std::invalid_argument("build_partition: total size overflows");
    }
    total += s;
  }
  if (total == 0) {
    throw std::invalid_argument("build_partition: partition would be empty");
  }

  std::vector<IndexRange> always;
  if (always_active_size > 0) {
    always.push_back({0, always_active_size});
  }
  std::vector<IndexRange> layers;
  layers.reserve(layer_sizes.size());
  std::size_t offset = always_active_size;
  for (std::size_t s : layer_sizes) {
    layers.push_back({offset, s});
    offset += s;
  }
  return LayerPartition(std::move(always), std::move(layers));
}

void validate_dropped(std::span<const std::uint32_t> dropped,
                      std::size_t num_layers) {
  for (std::size_t i = 0; i < dropped.size(); ++i) {
    if (dropped[i] >= num_layers) {
      throw std::invalid_argument("dropped layer index " +
                                  std::to_string(dropped[i]) +
                                  " out of range");
    }
    if (i > 0 && dropped[i - 1] >= dropped[i]) {
      throw std::invalid_argument(
          "dropped layer set must be sorted and unique");
    }
  }
}

}  // namespace zoforge
