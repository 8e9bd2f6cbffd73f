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

#include "kevo/evaluator.hpp"

#include <fmt/core.h>

#include "kevo/subprocess_evaluator.hpp"

namespace kevo {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kCompile: return "compile";
    case Stage::kTest: return "test";
    case Stage::kTime: return "time";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  if (name == "compile") return Stage::kCompile;
  if (name == "test") return Stage::kTest;
  if (name == "time") return Stage::kTime;
  throw ConfigError(fmt::format("unknown stage '{}'", name));
}

void SyntheticRules::validate() const {
  if (compile_token.empty() || correct_token.empty() || speed_token.empty()) {
    throw ConfigError("synthetic tokens must be non-empty");
  }
  if (compile_token == correct_token || compile_token == speed_token ||
      correct_token == speed_token) {
    throw ConfigError("synthetic tokens must be pairwise distinct");
  }
  if (!(base_ms > 0.0)) throw ConfigError("synthetic base_ms must be > 0");
}

void EvalConfig::validate() const {
  static constexpr Stage kOrder[] = {Stage::kCompile, Stage::kTest, Stage::kTime};
  if (stages.empty() || stages.size() > 3) {
    throw ConfigError("stages must list 1 to 3 stages");
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] != kOrder[i]) {
      throw ConfigError("stages must be a prefix of [compile, test, time]");
    }
  }
  if (timing_runs < 1) throw ConfigError("timing_runs must be >= 1");
  if (warmup_runs < 0) throw ConfigError("warmup_runs must be >= 0");
  if (!(timeouts.compile_s > 0.0) || !(timeouts.test_case_s > 0.0) ||
      !(timeouts.timing_s > 0.0)) {
    throw ConfigError("stage timeouts must be > 0");
  }
  if (const auto* rules = std::get_if<SyntheticRules>(&evaluator)) {
    rules->validate();
  } else if (std::get<SubprocessSpec>(evaluator).command.empty()) {
    throw ConfigError("subprocess evaluator needs a command");
  }
}

bool EvalConfig::runs(Stage s) const {
  for (auto st : stages) {
    if (st == s) return true;
  }
  return false;
}

std::size_t count_token(std::string_view text, std::string_view token) {
  if (token.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = text.find(token); pos != std::string_view::npos;
       pos = text.find(token, pos + token.size())) {
    ++n;
  }
  return n;
}

EvaluationResult evaluate_synthetic(std::string_view code, const Task& task,
                                    const EvalConfig& cfg, const SyntheticRules& rules) {
  if (code.empty()) throw ContractViolation("evaluate needs non-empty code");
  EvaluationResult r;
  r.compile_ok = count_token(code, rules.compile_token) > 0;
  if (!r.compile_ok) {
    r.compile_log = fmt::format("error: required token '{}' not found", rules.compile_token);
    return r;
  }
  r.compile_log = "ok";
  if (!cfg.runs(Stage::kTest)) return r;

  const bool correct = count_token(code, rules.correct_token) > 0;
  TestResults tests;
  tests.total = task.test_spec.n_cases;
  tests.passed = correct ? tests.total : 0;
  tests.max_abs_error = correct ? 0.0 : 1.0;
  r.tests = tests;
  if (!correct || !cfg.runs(Stage::kTime)) return r;

  TimingStats timing;
  timing.runs = cfg.timing_runs;
  timing.warmup_runs = cfg.warmup_runs;
  timing.mean_ms =
      rules.base_ms / (1.0 + static_cast<double>(count_token(code, rules.speed_token)));
  timing.std_ms = 0.0;
  r.timing = timing;
  return r;
}

SyntheticEvaluator::SyntheticEvaluator(SyntheticRules rules) : rules_(std::move(rules)) {
  rules_.validate();
}

EvaluationResult SyntheticEvaluator::evaluate(std::string_view code, const Task& task,
                                              const EvalConfig& cfg) {
  return evaluate_synthetic(code, task, cfg, rules_);
}

std::vector<EvaluationResult> evaluate_synthetic_batch(std::span<const std::string> codes,
                                                       const Task& task, const EvalConfig& cfg,
                                                       const SyntheticRules& rules) {
  for (const auto& code : codes) {
    if (code.empty()) throw ContractViolation("evaluate needs non-empty code");
  }
  std::vector<EvaluationResult> out(codes.size());
  const auto n = static_cast<std::ptrdiff_t>(codes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = evaluate_synthetic(codes[i], task, cfg, rules);
  }
  return out;
}

std::vector<EvaluationResult> evaluate_synthetic_batch_serial(
    std::span<const std::string> codes, const Task& task, const EvalConfig& cfg,
    const SyntheticRules& rules) {
  std::vector<EvaluationResult> out;
  out.reserve(codes.size());
  for (const auto& code : codes) out.push_back(evaluate_synthetic(code, task, cfg, rules));
  return out;
}

std::unique_ptr<Evaluator> make_evaluator(const EvalConfig& cfg) {
  if (const auto* rules = std::get_if<SyntheticRules>(&cfg.evaluator)) {
    return std::make_unique<SyntheticEvaluator>(*rules);
  }
  return std::make_unique<SubprocessEvaluator>(std::get<SubprocessSpec>(cfg.evaluator));
}

}  // namespace kevo
