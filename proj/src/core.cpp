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

#include "kevo/core.hpp"

#include <fmt/core.h>

#include <cmath>
#include <set>

#include "kevo/hashing.hpp"

namespace kevo {

namespace {

constexpr std::array<std::string_view, 6> kCategoryNames = {
    "matmul", "convolution", "activation-pooling", "normalization-reduction",
    "loss",   "cumulative",
};

constexpr std::array<std::string_view, 8> kStatusNames = {
    "Pending", "CompileError", "TestFailure", "RuntimeError",
    "Timeout", "Valid",        "ParseError",  "EmptyCompletion",
};

}  // namespace

std::string_view to_string(Category c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

Category parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return kAllCategories[i];
  }
  throw ConfigError(fmt::format("unknown task category '{}'", name));
}

std::string_view to_string(Status s) {
  return kStatusNames[static_cast<std::size_t>(s)];
}

Status parse_status(std::string_view name) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == name) return kAllStatuses[i];
  }
  throw ArchiveError(fmt::format("unknown candidate status '{}'", name));
}

bool is_valid(const EvaluationResult& eval) {
  return eval.compile_ok && eval.tests.has_value() &&
         eval.tests->passed == eval.tests->total;
}

Status classify(const EvaluationResult& eval) {
  if (eval.error) {
    return eval.error->reason == "timeout" ? Status::kTimeout
                                           : Status::kRuntimeError;
  }
  if (!eval.compile_ok) return Status::kCompileError;
  if (!is_valid(eval)) return Status::kTestFailure;
  return Status::kValid;
}

double speedup(double baseline_mean_ms, double candidate_mean_ms) {
  if (!(baseline_mean_ms > 0.0) || !(candidate_mean_ms > 0.0)) {
    throw DomainError(fmt::format("speedup needs positive times, got {} / {}",
                                  baseline_mean_ms, candidate_mean_ms));
  }
  return baseline_mean_ms / candidate_mean_ms;
}

std::vector<std::string> validate_task(const Task& task) {
  std::vector<std::string> out;
  if (task.id.empty()) out.emplace_back("id must be non-empty");
  if (!(task.baseline_mean_ms > 0.0) || !std::isfinite(task.baseline_mean_ms)) {
    out.emplace_back("baseline_mean_ms must be > 0");
  }
  if (task.initial_code.empty()) out.emplace_back("initial_code must be non-empty");
  if (task.test_spec.n_cases < 1) out.emplace_back("test_spec.n_cases must be >= 1");
  if (!(task.test_spec.abs_tolerance >= 0.0)) {
    out.emplace_back("test_spec.abs_tolerance must be >= 0");
  }
  if (!(task.test_spec.rel_tolerance >= 0.0)) {
    out.emplace_back("test_spec.rel_tolerance must be >= 0");
  }
  return out;
}

std::vector<std::string> validate_task_set(const std::vector<Task>& tasks) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : tasks) {
    for (auto& v : validate_task(t)) {
      out.push_back(fmt::format("task '{}': {}", t.id, v));
    }
    if (!t.id.empty() && !seen.insert(t.id).second) {
      out.push_back(fmt::format("task '{}': id must be unique within the task set", t.id));
    }
  }
  return out;
}

std::string candidate_id(std::size_t trial_index, std::string_view code) {
  return fmt::format("{}-{}", trial_index, sha256_hex(code).substr(0, 16));
}

}  // namespace kevo
