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

#include "kevo/json_io.hpp"

#include <fmt/core.h>

#include <fstream>

namespace kevo {

namespace {

template <typename T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
void optional_from_json(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
  } else {
    out = it->template get<T>();
  }
}

}  // namespace

void to_json(Json& j, const TestSpec& v) {
  j = Json{{"n_cases", v.n_cases},
           {"input_seed", v.input_seed},
           {"abs_tolerance", v.abs_tolerance},
           {"rel_tolerance", v.rel_tolerance}};
}

void from_json(const Json& j, TestSpec& v) {
  TestSpec d;
  v.n_cases = j.value("n_cases", d.n_cases);
  v.input_seed = j.value("input_seed", d.input_seed);
  v.abs_tolerance = j.value("abs_tolerance", d.abs_tolerance);
  v.rel_tolerance = j.value("rel_tolerance", d.rel_tolerance);
}

void to_json(Json& j, const Task& v) {
  j = Json{{"id", v.id},
           {"category", std::string(to_string(v.category))},
           {"description", v.description},
           {"reference_source", v.reference_source},
           {"initial_code", v.initial_code},
           {"test_spec", v.test_spec},
           {"baseline_mean_ms", v.baseline_mean_ms}};
}

void from_json(const Json& j, Task& v) {
  v.id = j.at("id").get<std::string>();
  v.category = parse_category(j.at("category").get<std::string>());
  v.description = j.value("description", std::string{});
  v.reference_source = j.value("reference_source", std::string{});
  v.initial_code = j.value("initial_code", std::string{});
  v.test_spec = j.contains("test_spec") ? j.at("test_spec").get<TestSpec>() : TestSpec{};
  v.baseline_mean_ms = j.at("baseline_mean_ms").get<double>();
}

void to_json(Json& j, const TokenUsage& v) {
  j = Json{{"input_tokens", v.input_tokens}, {"output_tokens", v.output_tokens}};
}

void from_json(const Json& j, TokenUsage& v) {
  v.input_tokens = j.at("input_tokens").get<std::uint64_t>();
  v.output_tokens = j.at("output_tokens").get<std::uint64_t>();
}

void to_json(Json& j, const TimingStats& v) {
  j = Json{{"runs", v.runs},
           {"warmup_runs", v.warmup_runs},
           {"mean_ms", v.mean_ms},
           {"std_ms", v.std_ms}};
}

void from_json(const Json& j, TimingStats& v) {
  v.runs = j.at("runs").get<int>();
  v.warmup_runs = j.value("warmup_runs", 0);
  v.mean_ms = j.at("mean_ms").get<double>();
  v.std_ms = j.at("std_ms").get<double>();
}

void to_json(Json& j, const TestResults& v) {
  j = Json{{"passed", v.passed},
           {"total", v.total},
           {"max_abs_error", optional_to_json(v.max_abs_error)}};
}

void from_json(const Json& j, TestResults& v) {
  v.passed = j.at("passed").get<int>();
  v.total = j.at("total").get<int>();
  optional_from_json(j, "max_abs_error", v.max_abs_error);
}

void to_json(Json& j, const StageError& v) {
  j = Json{{"stage", v.stage}, {"reason", v.reason}, {"message", v.message}};
}

void from_json(const Json& j, StageError& v) {
  v.stage = j.at("stage").get<std::string>();
  v.reason = j.at("reason").get<std::string>();
  v.message = j.value("message", std::string{});
}

void to_json(Json& j, const EvaluationResult& v) {
  j = Json{{"compile", Json{{"ok", v.compile_ok}, {"log", v.compile_log}}},
           {"tests", optional_to_json(v.tests)},
           {"timing", optional_to_json(v.timing)},
           {"error", optional_to_json(v.error)}};
}

void from_json(const Json& j, EvaluationResult& v) {
  const auto& c = j.at("compile");
  if (c.is_null()) {
    v.compile_ok = false;
    v.compile_log.clear();
  } else {
    v.compile_ok = c.at("ok").get<bool>();
    v.compile_log = c.value("log", std::string{});
  }
  optional_from_json(j, "tests", v.tests);
  optional_from_json(j, "timing", v.timing);
  optional_from_json(j, "error", v.error);
}

void to_json(Json& j, const Insight& v) {
  j = Json{{"text", v.text},
           {"source_candidate", v.source_candidate},
           {"fitness_at_creation", optional_to_json(v.fitness_at_creation)}};
}

void from_json(const Json& j, Insight& v) {
  v.text = j.at("text").get<std::string>();
  v.source_candidate = j.value("source_candidate", std::string{});
  optional_from_json(j, "fitness_at_creation", v.fitness_at_creation);
}

void to_json(Json& j, const Candidate& v) {
  j = Json{{"id", v.id},
           {"trial_index", v.trial_index},
           {"generation", v.generation},
           {"status", std::string(to_string(v.status))},
           {"parent_ids", v.parent_ids},
           {"code", v.code},
           {"eval", optional_to_json(v.eval)},
           {"insight", optional_to_json(v.insight)},
           {"tokens", v.tokens},
           {"fitness", optional_to_json(v.fitness)}};
}

void from_json(const Json& j, Candidate& v) {
  v.id = j.at("id").get<std::string>();
  v.trial_index = j.at("trial_index").get<std::size_t>();
  v.generation = j.at("generation").get<std::size_t>();
  v.status = parse_status(j.at("status").get<std::string>());
  v.parent_ids = j.value("parent_ids", std::vector<std::string>{});
  v.code = j.value("code", std::string{});
  optional_from_json(j, "eval", v.eval);
  optional_from_json(j, "insight", v.insight);
  v.tokens = j.contains("tokens") ? j.at("tokens").get<TokenUsage>() : TokenUsage{};
  optional_from_json(j, "fitness", v.fitness);
}

std::vector<Task> parse_tasks(const Json& doc) {
  const Json& arr = doc.is_object() ? doc.at("tasks") : doc;
  if (!arr.is_array()) throw ConfigError("task set must be an array of tasks");
  std::vector<Task> tasks;
  tasks.reserve(arr.size());
  for (const auto& t : arr) tasks.push_back(t.get<Task>());
  return tasks;
}

std::vector<Task> load_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open task file '{}'", path));
  try {
    return parse_tasks(Json::parse(in));
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("task file '{}': {}", path, e.what()));
  }
}

}  // namespace kevo
