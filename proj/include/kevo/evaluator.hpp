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

// Staged candidate evaluation: compile, then functional tests, then timing.
// Each stage runs only when the previous one fully succeeded.

#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kevo/core.hpp"

namespace kevo {

enum class Stage { kCompile, kTest, kTime };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view name);

struct StageTimeouts {
  double compile_s = 120.0;
  double test_case_s = 30.0;
  double timing_s = 300.0;

  bool operator==(const StageTimeouts&) const = default;
};

// Deterministic stand-in for a real toolchain: code compiles iff it contains
// compile_token, passes every case iff it contains correct_token, and runs in
// base_ms / (1 + occurrences of speed_token).
struct SyntheticRules {
  std::string compile_token = "VALID";
  std::string correct_token = "CORRECT";
  std::string speed_token = "FAST";
  double base_ms = 100.0;

  void validate() const;
  bool operator==(const SyntheticRules&) const = default;
};

struct SubprocessSpec {
  std::string command;      // run through /bin/sh -c
  std::string working_dir;  // empty: inherit

  bool operator==(const SubprocessSpec&) const = default;
};

struct EvalConfig {
  std::vector<Stage> stages = {Stage::kCompile, Stage::kTest, Stage::kTime};
  int timing_runs = 100;
  int warmup_runs = 10;
  StageTimeouts timeouts;
  std::variant<SyntheticRules, SubprocessSpec> evaluator = SyntheticRules{};

  // Stages must be a non-empty prefix of (compile, test, time).
  void validate() const;
  bool runs(Stage s) const;
  bool operator==(const EvalConfig&) const = default;
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  // Throws EvaluatorFault when the evaluator itself breaks and ProtocolError
  // on a malformed reply; candidate failures are reported in the result.
  virtual EvaluationResult evaluate(std::string_view code, const Task& task,
                                    const EvalConfig& cfg) = 0;
};

// Non-overlapping occurrences of token in text.
std::size_t count_token(std::string_view text, std::string_view token);

EvaluationResult evaluate_synthetic(std::string_view code, const Task& task,
                                    const EvalConfig& cfg, const SyntheticRules& rules);

class SyntheticEvaluator final : public Evaluator {
 public:
  explicit SyntheticEvaluator(SyntheticRules rules = {});
  EvaluationResult evaluate(std::string_view code, const Task& task,
                            const EvalConfig& cfg) override;

 private:
  SyntheticRules rules_;
};

// Evaluates many candidates with OpenMP. Output order matches input order.
std::vector<EvaluationResult> evaluate_synthetic_batch(std::span<const std::string> codes,
                                                       const Task& task, const EvalConfig& cfg,
                                                       const SyntheticRules& rules);
// Single-threaded reference for evaluate_synthetic_batch.
std::vector<EvaluationResult> evaluate_synthetic_batch_serial(
    std::span<const std::string> codes, const Task& task, const EvalConfig& cfg,
    const SyntheticRules& rules);

// Synthetic or subprocess evaluator as selected by cfg.evaluator.
std::unique_ptr<Evaluator> make_evaluator(const EvalConfig& cfg);

}  // namespace kevo
