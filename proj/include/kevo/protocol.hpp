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

// evoeval/1: newline-delimited JSON between the search loop and an external
// evaluator process. One request line in, one reply line out.
//
// Request: {"version","op":"evaluate","task_id","code","stages","n_cases",
//           "input_seed","abs_tolerance","rel_tolerance","timing_runs",
//           "warmup_runs","per_stage_timeout_s":{"compile","test","time"}}
// Reply:   {"version","compile":{"ok","log"}|null,
//           "tests":{"passed","total","max_abs_error"}|null,
//           "timing":{"runs","mean_ms","std_ms"}|null,
//           "error":{"stage","reason","message"}|null}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kevo/core.hpp"
#include "kevo/evaluator.hpp"

namespace kevo {

inline constexpr std::string_view kProtocolVersion = "evoeval/1";

struct EvalRequest {
  std::string task_id;
  std::string code;
  std::vector<Stage> stages;
  int n_cases = 5;
  std::uint64_t input_seed = 0;
  double abs_tolerance = 0.0;
  double rel_tolerance = 0.0;
  int timing_runs = 100;
  int warmup_runs = 10;
  StageTimeouts timeouts;

  bool operator==(const EvalRequest&) const = default;
};

EvalRequest make_request(std::string_view code, const Task& task, const EvalConfig& cfg);

// Single line, no trailing newline.
std::string encode_request(const EvalRequest& req);
std::string encode_request(std::string_view code, const Task& task, const EvalConfig& cfg);
// Throws ProtocolError.
EvalRequest decode_request(std::string_view line);

std::string encode_reply(const EvaluationResult& result);
// Reply for a request that could not be handled at all.
std::string encode_error_reply(const StageError& error);
// Throws ProtocolError on bad JSON, wrong version, missing fields, or a reply
// that breaks stage gating.
EvaluationResult decode_response(std::string_view line);

// Checks the gating invariants; empty string when the result is consistent.
std::string gating_violation(const EvaluationResult& result);

// Serves evoeval/1 with the synthetic rules until EOF. Malformed requests get
// an error reply and the loop continues. Returns the process exit code.
int serve_synthetic(std::istream& in, std::ostream& out, const SyntheticRules& rules);

}  // namespace kevo
