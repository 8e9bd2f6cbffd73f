// Copyright 2026 The Kevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "kevo/evaluator.hpp"
#include "kevo/json_io.hpp"
#include "kevo/llm_backend.hpp"
#include "kevo/remote_backend.hpp"
#include "kevo/traverse.hpp"

namespace kevo {

struct BackendSpec {
  enum class Kind { kScripted, kRemote };
  Kind kind = Kind::kScripted;
  std::string corpus_path;
  bool cycle = false;
  // Permute the scripted corpus with the run seed.
  bool shuffle = false;
  RemoteConfig remote;
};

// "scripted:<path>" or "remote". Throws ConfigError.
BackendSpec::Kind parse_backend_flag(std::string_view flag, std::string* corpus_path);

struct RunConfig {
  StrategyConfig strategy = StrategyConfig::preset(StrategyName::kFull);
  std::size_t budget_trials = 45;
  std::size_t init_trials = 5;
  std::size_t offspring_per_generation = 4;
  std::size_t generations = 10;
  std::uint64_t seed = 0;
  GenerationParams generation_params;
  EvalConfig eval_config;
  int runs_repeat = 3;
  std::size_t insight_capacity = 10;
  std::size_t feedback_limit = 2000;
  std::string template_path;  // empty: canonical template
  std::string tasks_file;
  BackendSpec backend;
  PriceTable prices = PriceTable::standard();

  // Defaults for a named configuration: Full/Solution get the 5 + 4 x 10
  // generational schedule, Free/Insight a flat 45-trial loop.
  static RunConfig for_strategy(StrategyName name);

  // True when trials are grouped into generations with elite survival.
  bool generational() const;
  // Generation number of a trial: 0 for the init phase, then 1..generations.
  // Flat loops use the trial index.
  std::size_t generation_of(std::size_t trial_index) const;

  void validate() const;
};

// Fields that determine the search trajectory. Stored in every archive header
// and compared on resume. Paths and credentials are deliberately absent.
Json search_snapshot(const RunConfig& cfg);

// Strict parse: unknown keys are rejected. Relative paths resolve against
// base_dir. Throws ConfigError.
RunConfig parse_run_config(const Json& doc, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

}  // namespace kevo
