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

// Domain types shared by every module: tasks, candidates, staged evaluation
// results and the feasibility predicate that decides whether a candidate may
// carry a fitness at all.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kevo/errors.hpp"

namespace kevo {

enum class Category {
  kMatmul,
  kConvolution,
  kActivationPooling,
  kNormalizationReduction,
  kLoss,
  kCumulative,
};

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::kMatmul,
    Category::kConvolution,
    Category::kActivationPooling,
    Category::kNormalizationReduction,
    Category::kLoss,
    Category::kCumulative,
};

std::string_view to_string(Category c);
// Throws ConfigError on an unknown name.
Category parse_category(std::string_view name);

struct TestSpec {
  int n_cases = 5;
  std::uint64_t input_seed = 0;
  double abs_tolerance = 1e-2;
  double rel_tolerance = 1e-2;

  bool operator==(const TestSpec&) const = default;
};

struct Task {
  std::string id;
  Category category = Category::kMatmul;
  std::string description;
  std::string reference_source;
  std::string initial_code;
  TestSpec test_spec;
  double baseline_mean_ms = 0.0;

  bool operator==(const Task&) const = default;
};

struct TokenUsage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
  bool operator==(const TokenUsage&) const = default;
};

struct TimingStats {
  int runs = 100;
  int warmup_runs = 10;
  double mean_ms = 0.0;
  double std_ms = 0.0;

  bool operator==(const TimingStats&) const = default;
};

struct TestResults {
  int passed = 0;
  int total = 0;
  std::optional<double> max_abs_error;

  bool operator==(const TestResults&) const = default;
};

// Why a stage did not complete. reason is "timeout" for stage timeouts and a
// short machine tag otherwise ("crash", "toolchain", "no-device", ...).
struct StageError {
  std::string stage;
  std::string reason;
  std::string message;

  bool operator==(const StageError&) const = default;
};

struct EvaluationResult {
  bool compile_ok = false;
  std::string compile_log;
  std::optional<TestResults> tests;   // only when compile_ok
  std::optional<TimingStats> timing;  // only when every test passed
  std::optional<StageError> error;

  bool operator==(const EvaluationResult&) const = default;
};

enum class Status {
  kPending,
  kCompileError,
  kTestFailure,
  kRuntimeError,
  kTimeout,
  kValid,
  kParseError,
  kEmptyCompletion,
};

inline constexpr std::array<Status, 8> kAllStatuses = {
    Status::kPending,      Status::kCompileError, Status::kTestFailure,
    Status::kRuntimeError, Status::kTimeout,      Status::kValid,
    Status::kParseError,   Status::kEmptyCompletion,
};

std::string_view to_string(Status s);
Status parse_status(std::string_view name);

struct Insight {
  std::string text;
  std::string source_candidate;
  std::optional<double> fitness_at_creation;

  bool operator==(const Insight&) const = default;
};

struct Candidate {
  std::string id;
  std::string code;
  std::vector<std::string> parent_ids;
  std::size_t trial_index = 0;
  std::size_t generation = 0;
  Status status = Status::kPending;
  std::optional<EvaluationResult> eval;
  std::optional<Insight> insight;
  TokenUsage tokens;
  // Speedup over the task baseline; set only for Valid candidates with timing.
  std::optional<double> fitness;

  bool operator==(const Candidate&) const = default;
};

// The feasibility predicate g(p) = 0: compiled and every functional case passed.
bool is_valid(const EvaluationResult& eval);

// Maps a completed evaluation onto the candidate status it implies.
Status classify(const EvaluationResult& eval);

// baseline / candidate. Throws DomainError unless both are > 0.
double speedup(double baseline_mean_ms, double candidate_mean_ms);

// Empty iff every Task invariant holds.
std::vector<std::string> validate_task(const Task& task);

// Same as validate_task over a set, plus id uniqueness.
std::vector<std::string> validate_task_set(const std::vector<Task>& tasks);

// "<trial>-<first 16 hex chars of sha256(code)>".
std::string candidate_id(std::size_t trial_index, std::string_view code);

}  // namespace kevo
