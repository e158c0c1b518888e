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

#include "zoforge/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace zoforge::cli {

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buffer, ptr);
}

std::string step_csv_row(const StepRecord& record,
                         std::optional<double> eval_metric) {
  std::string row;
  row.reserve(160);
  row += std::to_string(record.step);
  row += ',';
  row += format_double(record.loss_plus);
  row += ',';
  row += format_double(record.loss_minus);
  row += ',';
  row += format_double(record.projected_grad);
  row += ',';
  if (eval_metric) row += format_double(*eval_metric);
  row += ',';
  row += std::to_string(record.time_forward_ns);
  row += ',';
  row += std::to_string(record.time_perturb_ns);
  row += ',';
  row += std::to_string(record.time_update_ns);
  row += ',';
  row += std::to_string(record.alloc_delta_bytes);
  return row;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("read_step_csv: bad numeric field '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("read_step_csv: bad integer field '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<StepCsvRow> read_step_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_step_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_step_csv: " + path + " is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kStepCsvHeader) {
    throw std::runtime_error("read_step_csv: unexpected header in " + path);
  }
  std::vector<StepCsvRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 9) {
      throw std::runtime_error("read_step_csv: expected 9 fields in " + path);
    }
    StepCsvRow row;
    row.step = to_u64(f[0]);
    row.loss_plus = to_double(f[1]);
    row.loss_minus = to_double(f[2]);
    row.projected_grad = to_double(f[3]);
    if (!f[4].empty()) row.eval_metric = to_double(f[4]);
    row.time_forward_ns = to_u64(f[5]);
    row.time_perturb_ns = to_u64(f[6]);
    row.time_update_ns = to_u64(f[7]);
    row.alloc_delta_bytes = to_u64(f[8]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace zoforge::cli
