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

#include "zoforge/cli/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace zoforge::cli {
namespace {

constexpr char kMagic[8] = {'Z', 'O', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ofstream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

void put_double(std::ofstream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

double get_double(std::ifstream& in) {
  const std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

void write_checkpoint(const std::string& path, const ParameterVector& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, 8);
  const LayerPartition& part = params.partition();
  put_u64(out, params.size());
  put_u64(out, part.always_active().size());
  put_u64(out, part.layers().size());
  for (const IndexRange& r : part.always_active()) {
    put_u64(out, r.offset);
    put_u64(out, r.len);
  }
  for (const IndexRange& r : part.layers()) {
    put_u64(out, r.offset);
    put_u64(out, r.len);
  }
  for (std::size_t i = 0; i < params.size(); ++i) put_double(out, params[i]);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

ParameterVector read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const std::uint64_t total = get_u64(in);
  const std::uint64_t n_always = get_u64(in);
  const std::uint64_t n_layers = get_u64(in);
  std::vector<IndexRange> always(n_always);
  for (IndexRange& r : always) {
    r.offset = get_u64(in);
    r.len = get_u64(in);
  }
  std::vector<IndexRange> layers(n_layers);
  for (IndexRange& r : layers) {
    r.offset = get_u64(in);
    r.len = get_u64(in);
  }
  std::vector<double> values(total);
  for (double& v : values) v = get_double(in);
  return ParameterVector(std::move(values),
                         LayerPartition(std::move(always), std::move(layers)));
}

}  // namespace zoforge::cli
