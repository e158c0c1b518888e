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
#include <cstdint>
#include <span>
#include <vector>

namespace zoforge {

// Half-open index range [offset, offset + len) into a flat parameter array.
struct IndexRange {
  std::size_t offset = 0;
  std::size_t len = 0;

  bool operator==(const IndexRange&) const = default;
};

// Maps a flat parameter vector onto N droppable layers plus a set of
// always-active ranges (embedding/head analogue). Ranges are disjoint and
// together cover [0, total_len) exactly; layers are ordered by ascending
// offset. The partition is immutable after construction.
class LayerPartition {
 public:
  LayerPartition() = default;

  // Validates disjointness, full coverage of [0, total) and layer ordering;
  // throws std::invalid_argument on violation.
  LayerPartition(std::vector<IndexRange> always_active,
                 std::vector<IndexRange> layers);

  const std::vector<IndexRange>& layers() const { return layers_; }
  const std::vector<IndexRange>& always_active() const {
    return always_active_;
  }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t total_len() const { return total_len_; }

  // Number of elements outside the given dropped layers. `dropped_sorted`
  // must be ascending, unique, and < num_layers().
  std::size_t active_count(std::span<const std::uint32_t> dropped_sorted) const;

  bool operator==(const LayerPartition&) const = default;

 private:
  std::vector<IndexRange> always_active_;
  std::vector<IndexRange> layers_;
  std::size_t total_len_ = 0;
};

// Contiguous layout with the always-active segment first, then the layers in
// the given order. Sizes must be positive; the total must not overflow.
LayerPartition build_partition(const std::vector<std::size_t>& layer_sizes,
                               std::size_t always_active_size);

// Throws std::invalid_argument unless `dropped` is sorted ascending, unique,
// and every entry is < num_layers.
void validate_dropped(std::span<const std::uint32_t> dropped,
                      std::size_t num_layers);

// Visits every active range in canonical order: always-active ranges in
// listed order first, then non-dropped layers by ascending layer index.
// The perturb pass and the update pass of a step must both use this walk so
// they consume the perturbation stream identically.
template <class Fn>
inline void for_each_active_range(const LayerPartition& partition,
                                  std::span<const std::uint32_t> dropped_sorted,
                                  Fn&& fn) {
  for (const IndexRange& r : partition.always_active()) {
    fn(r.offset, r.len);
  }
  const auto& layers = partition.layers();
  std::size_t next_dropped = 0;
  for (std::uint32_t li = 0; li < layers.size(); ++li) {
    if (next_dropped < dropped_sorted.size() &&
        dropped_sorted[next_dropped] == li) {
      ++next_dropped;
      continue;
    }
    fn(layers[li].offset, layers[li].len);
  }
}

}  // namespace zoforge
