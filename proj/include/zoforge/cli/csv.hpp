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
#include <optional>
#include <string>
#include <vector>

#include "zoforge/engine.hpp"

namespace zoforge::cli {

// Shortest round-trip decimal form; replays compare these fields bitwise.
std::string format_double(double value);

inline constexpr const char* kStepCsvHeader =
    "step,loss_plus,loss_minus,projected_grad,eval_metric,time_forward_ns,"
    "time_perturb_ns,time_update_ns,alloc_delta_bytes";

std::string step_csv_row(const StepRecord& record,
                         std::optional<double> eval_metric);

struct StepCsvRow {
  std::uint64_t step = 0;
  double loss_plus = 0.0;
  double loss_minus = 0.0;
  double projected_grad = 0.0;
  std::optional<double> eval_metric;
  std::uint64_t time_forward_ns = 0;
  std::uint64_t time_perturb_ns = 0;
  std::uint64_t time_update_ns = 0;
  std::uint64_t alloc_delta_bytes = 0;
};

std::vector<StepCsvRow> read_step_csv(const std::string& path);

}  // namespace zoforge::cli
