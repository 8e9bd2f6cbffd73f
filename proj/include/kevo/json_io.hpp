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

#include <json.hpp>

#include "kevo/core.hpp"

namespace kevo {

// Insertion-ordered JSON: every serialized object has a stable field order,
// which the archive hash and the evaluator protocol both rely on.
using Json = nlohmann::ordered_json;

void to_json(Json& j, const TestSpec& v);
void from_json(const Json& j, TestSpec& v);
void to_json(Json& j, const Task& v);
void from_json(const Json& j, Task& v);
void to_json(Json& j, const TokenUsage& v);
void from_json(const Json& j, TokenUsage& v);
void to_json(Json& j, const TimingStats& v);
void from_json(const Json& j, TimingStats& v);
void to_json(Json& j, const TestResults& v);
void from_json(const Json& j, TestResults& v);
void to_json(Json& j, const StageError& v);
void from_json(const Json& j, StageError& v);
void to_json(Json& j, const EvaluationResult& v);
void from_json(const Json& j, EvaluationResult& v);
void to_json(Json& j, const Insight& v);
void from_json(const Json& j, Insight& v);
void to_json(Json& j, const Candidate& v);
void from_json(const Json& j, Candidate& v);

// Loads a task set: either {"tasks": [...]} or a bare array.
std::vector<Task> load_tasks(const std::string& path);
std::vector<Task> parse_tasks(const Json& doc);

}  // namespace kevo
