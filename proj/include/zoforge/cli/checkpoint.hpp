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

#include <string>

#include "zoforge/parameter_vector.hpp"

namespace zoforge::cli {

// Checkpoint binary layout, all integers and doubles little-endian:
//   bytes 0..7   magic "ZOFCKPT1"
//   u64          total parameter count d
//   u64          number of always-active ranges
//   u64          number of layer ranges
//   (u64 offset, u64 len) per always-active range, then per layer range
//   d doubles    raw parameter values
void write_checkpoint(const std::string& path, const ParameterVector& params);

ParameterVector read_checkpoint(const std::string& path);

}  // namespace zoforge::cli
