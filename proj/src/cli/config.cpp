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

#include "zoforge/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "zoforge/models/logistic.hpp"
#include "zoforge/models/mlp.hpp"
#include "zoforge/models/quadratic.hpp"
#include "zoforge/models/transformer.hpp"
#include "zoforge/rng.hpp"

namespace zoforge::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line;
};

// Grammar: `[section]` headers, `key = value` pairs, `#` comments, blank
// lines. Values may be comma-separated lists for list-valued keys.
std::vector<Entry> tokenize(const std::string& text,
                            const std::string& origin) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.resize(comment);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        throw config_error(origin + ":" + std::to_string(line_no) +
                           ": malformed section header");
      }
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw config_error(origin + ":" + std::to_string(line_no) +
                         ": expected key = value");
    }
    Entry e;
    e.section = section;
    e.key = trim(body.substr(0, eq));
    e.value = trim(body.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) {
      throw config_error(origin + ":" + std::to_string(line_no) +
                         ": empty key");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

double parse_double(const Entry& e) {
  const std::string& s = e.value;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw config_error("key '" + e.key + "': expected a number, got '" + s +
                       "'");
  }
  return v;
}

std::uint64_t parse_u64(const Entry& e) {
  const double v = parse_double(e);
  if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
    throw config_error("key '" + e.key + "': expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_double_list(const Entry& e) {
  std::vector<double> out;
  for (const std::string& item : split_list(e.value)) {
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw config_error("key '" + e.key + "': expected numbers, got '" +
                         item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw config_error("key '" + e.key + "': empty list");
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const Entry& e) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(e)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw config_error("key '" + e.key + "': expected positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

RunMode run_mode_from_string(const std::string& name) {
  if (name == "train") return RunMode::train;
  if (name == "bench_timing") return RunMode::bench_timing;
  if (name == "sweep_convergence") return RunMode::sweep_convergence;
  if (name == "grid_search") return RunMode::grid_search;
  throw config_error("unknown mode '" + name + "'");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::train: return "train";
    case RunMode::bench_timing: return "bench_timing";
    case RunMode::sweep_convergence: return "sweep_convergence";
    case RunMode::grid_search: return "grid_search";
  }
  return "unknown";
}

std::uint64_t ExperimentConfig::model_seed() const {
  return model.seed ? *model.seed : mix64(base_seed ^ 0x8BADF00D5EEDull);
}

std::uint64_t ExperimentConfig::data_seed() const {
  return data_seed_explicit ? data.seed
                            : mix64(base_seed ^ 0xDA7A5EED0Dull);
}

double ExperimentConfig::learning_rate() const {
  if (learning_rates.size() != 1) {
    throw config_error(
        "key 'learning_rate': a list is only valid in grid_search mode");
  }
  return learning_rates[0];
}

double ExperimentConfig::mu() const {
  if (mus.size() != 1) {
    throw config_error("key 'mu': a list is only valid in grid_search mode");
  }
  return mus[0];
}

void ExperimentConfig::validate() const {
  if (eval_every < 1) throw config_error("key 'eval_every': must be >= 1");
  if (repeats < 1) throw config_error("key 'repeats': must be >= 1");
  if (steps < 1) throw config_error("key 'steps': must be >= 1");
  if (batch_size < 1) throw config_error("key 'batch_size': must be >= 1");
  for (double lr : learning_rates) {
    if (!(lr > 0.0)) throw config_error("key 'learning_rate': must be > 0");
  }
  for (double m : mus) {
    if (!(m > 0.0)) throw config_error("key 'mu': must be > 0");
  }
  if (mode != RunMode::grid_search &&
      (learning_rates.size() != 1 || mus.size() != 1)) {
    throw config_error(
        "keys 'learning_rate'/'mu': lists are only valid in grid_search "
        "mode");
  }
  const bool known_kind = model.kind == "quadratic" ||
                          model.kind == "logistic" || model.kind == "mlp" ||
                          model.kind == "transformer";
  if (!known_kind) {
    throw config_error("key 'kind': unknown model kind '" + model.kind + "'");
  }
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
  ExperimentConfig cfg;
  for (const Entry& e : tokenize(text, origin)) {
    const std::string where = e.section.empty() ? "top level"
                                                : "section [" + e.section + "]";
    if (e.section == "model") {
      if (e.key == "kind") cfg.model.kind = e.value;
      else if (e.key == "layers") cfg.model.layers = parse_u64(e);
      else if (e.key == "hidden") cfg.model.hidden = parse_u64(e);
      else if (e.key == "d") cfg.model.dim = parse_u64(e);
      else if (e.key == "condition_number")
        cfg.model.condition_number = parse_double(e);
      else if (e.key == "vocab") cfg.model.vocab = parse_u64(e);
      else if (e.key == "seq_len") cfg.model.seq_len = parse_u64(e);
      else if (e.key == "embed_dim") cfg.model.embed_dim = parse_u64(e);
      else if (e.key == "seed") cfg.model.seed = parse_u64(e);
      else
        throw config_error("unknown key '" + e.key + "' in " + where);
    } else if (e.section == "data") {
      if (e.key == "kind") cfg.data.kind = dataset_kind_from_string(e.value);
      else if (e.key == "feature_dim") cfg.data.feature_dim = parse_u64(e);
      else if (e.key == "num_classes") cfg.data.num_classes = parse_u64(e);
      else if (e.key == "num_samples") cfg.data.num_samples = parse_u64(e);
      else if (e.key == "seed") {
        cfg.data.seed = parse_u64(e);
        cfg.data_seed_explicit = true;
      } else if (e.key == "path") cfg.data.path = e.value;
      else if (e.key == "separation") cfg.data.separation = parse_double(e);
      else if (e.key == "eval_fraction")
        cfg.data.eval_fraction = parse_double(e);
      else
        throw config_error("unknown key '" + e.key + "' in " + where);
    } else if (e.section == "optimizer") {
      if (e.key == "learning_rate") cfg.learning_rates = parse_double_list(e);
      else if (e.key == "mu") cfg.mus = parse_double_list(e);
      else if (e.key == "steps") cfg.steps = parse_u64(e);
      else if (e.key == "drop_count")
        cfg.drop_count = static_cast<std::uint32_t>(parse_u64(e));
      else if (e.key == "batch_size") cfg.batch_size = parse_u64(e);
      else
        throw config_error("unknown key '" + e.key + "' in " + where);
    } else if (e.section == "run") {
      if (e.key == "mode") cfg.mode = run_mode_from_string(e.value);
      else if (e.key == "eval_every") cfg.eval_every = parse_u64(e);
      else if (e.key == "repeats") cfg.repeats = parse_u64(e);
      else if (e.key == "base_seed") cfg.base_seed = parse_u64(e);
      else if (e.key == "output") cfg.output_path = e.value;
      else if (e.key == "warmup_steps") cfg.warmup_steps = parse_u64(e);
      else if (e.key == "measure_steps") cfg.measure_steps = parse_u64(e);
      else
        throw config_error("unknown key '" + e.key + "' in " + where);
    } else if (e.section == "sweep") {
      if (e.key == "d_list") cfg.sweep_d_list = parse_size_list(e);
      else if (e.key == "keep_fractions")
        cfg.sweep_keep_fractions = parse_double_list(e);
      else if (e.key == "threshold") cfg.sweep_threshold = parse_double(e);
      else if (e.key == "repeats") cfg.sweep_repeats = parse_u64(e);
      else if (e.key == "layers") cfg.sweep_layers = parse_u64(e);
      else if (e.key == "max_steps") cfg.sweep_max_steps = parse_u64(e);
      else if (e.key == "theta0_norm")
        cfg.sweep_theta0_norm = parse_double(e);
      else
        throw config_error("unknown key '" + e.key + "' in " + where);
    } else {
      throw config_error("unknown key '" + e.key + "' in " + where);
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), path);
}

std::unique_ptr<LossFunction> build_model(const ExperimentConfig& config,
                                          const Dataset& dataset) {
  const ModelConfig& m = config.model;
  const std::uint64_t seed = config.model_seed();
  if (m.kind == "quadratic") {
    return make_quadratic(m.dim, m.layers, m.condition_number, seed);
  }
  if (m.kind == "logistic") {
    return make_logistic(dataset.feature_dim, dataset.num_classes, m.layers,
                         seed);
  }
  if (m.kind == "mlp") {
    return make_mlp(dataset.feature_dim, m.hidden, dataset.num_classes, seed);
  }
  if (m.kind == "transformer") {
    if (dataset.feature_dim != m.seq_len) {
      throw config_error(
          "transformer: data feature_dim (token count) must equal seq_len");
    }
    return make_tiny_transformer(m.vocab, m.seq_len, m.embed_dim, m.layers,
                                 dataset.num_classes, seed);
  }
  throw config_error("key 'kind': unknown model kind '" + m.kind + "'");
}

}  // namespace zoforge::cli
