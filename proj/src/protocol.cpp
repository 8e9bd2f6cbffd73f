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

#include "kevo/protocol.hpp"

#include <fmt/core.h>

#include <istream>
#include <ostream>

#include "kevo/json_io.hpp"

namespace kevo {

namespace {

std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json parse_line(std::string_view line) {
  try {
    return Json::parse(line);
  } catch (const Json::exception& e) {
    throw ProtocolError(fmt::format("malformed evoeval message: {}", e.what()));
  }
}

void check_version(const Json& j) {
  auto it = j.find("version");
  if (it == j.end() || !it->is_string()) throw ProtocolError("message has no version");
  if (it->get<std::string>() != kProtocolVersion) {
    throw ProtocolError(fmt::format("unsupported protocol version '{}'", it->get<std::string>()));
  }
}

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(fmt::format("missing field '{}'", key));
  return *it;
}

}  // namespace

EvalRequest make_request(std::string_view code, const Task& task, const EvalConfig& cfg) {
  EvalRequest r;
  r.task_id = task.id;
  r.code = std::string(code);
  r.stages = cfg.stages;
  r.n_cases = task.test_spec.n_cases;
  r.input_seed = task.test_spec.input_seed;
  r.abs_tolerance = task.test_spec.abs_tolerance;
  r.rel_tolerance = task.test_spec.rel_tolerance;
  r.timing_runs = cfg.timing_runs;
  r.warmup_runs = cfg.warmup_runs;
  r.timeouts = cfg.timeouts;
  return r;
}

std::string encode_request(const EvalRequest& req) {
  Json stages = Json::array();
  for (auto s : req.stages) stages.push_back(std::string(to_string(s)));
  Json j{{"version", kProtocolVersion},
         {"op", "evaluate"},
         {"task_id", req.task_id},
         {"code", req.code},
         {"stages", stages},
         {"n_cases", req.n_cases},
         {"input_seed", req.input_seed},
         {"abs_tolerance", req.abs_tolerance},
         {"rel_tolerance", req.rel_tolerance},
         {"timing_runs", req.timing_runs},
         {"warmup_runs", req.warmup_runs},
         {"per_stage_timeout_s", Json{{"compile", req.timeouts.compile_s},
                                      {"test", req.timeouts.test_case_s},
                                      {"time", req.timeouts.timing_s}}}};
  return dump_line(j);
}

std::string encode_request(std::string_view code, const Task& task, const EvalConfig& cfg) {
  return encode_request(make_request(code, task, cfg));
}

EvalRequest decode_request(std::string_view line) {
  const Json j = parse_line(line);
  if (!j.is_object()) throw ProtocolError("request must be a JSON object");
  check_version(j);
  try {
    if (require(j, "op").get<std::string>() != "evaluate") {
      throw ProtocolError(fmt::format("unsupported op '{}'", j.at("op").get<std::string>()));
    }
    EvalRequest r;
    r.task_id = require(j, "task_id").get<std::string>();
    r.code = require(j, "code").get<std::string>();
    for (const auto& s : require(j, "stages")) {
      try {
        r.stages.push_back(parse_stage(s.get<std::string>()));
      } catch (const ConfigError& e) {
        throw ProtocolError(e.what());
      }
    }
    r.n_cases = require(j, "n_cases").get<int>();
    r.input_seed = require(j, "input_seed").get<std::uint64_t>();
    r.abs_tolerance = require(j, "abs_tolerance").get<double>();
    r.rel_tolerance = require(j, "rel_tolerance").get<double>();
    r.timing_runs = require(j, "timing_runs").get<int>();
    r.warmup_runs = require(j, "warmup_runs").get<int>();
    const auto& t = require(j, "per_stage_timeout_s");
    r.timeouts.compile_s = require(t, "compile").get<double>();
    r.timeouts.test_case_s = require(t, "test").get<double>();
    r.timeouts.timing_s = require(t, "time").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw ProtocolError(fmt::format("bad request field: {}", e.what()));
  }
}

std::string encode_reply(const EvaluationResult& result) {
  Json j{{"version", kProtocolVersion}};
  Json body = result;  // compile / tests / timing / error in that order
  for (auto& [k, v] : body.items()) j[k] = v;
  return dump_line(j);
}

std::string encode_error_reply(const StageError& error) {
  Json j{{"version", kProtocolVersion},
         {"compile", nullptr},
         {"tests", nullptr},
         {"timing", nullptr},
         {"error", error}};
  return dump_line(j);
}

std::string gating_violation(const EvaluationResult& r) {
  if (r.tests && !r.compile_ok) return "tests present without a successful compile";
  if (r.tests) {
    if (r.tests->total < 1) return "tests.total must be >= 1";
    if (r.tests->passed < 0 || r.tests->passed > r.tests->total) {
      return "tests.passed outside [0, total]";
    }
    if (r.tests->max_abs_error && !(*r.tests->max_abs_error >= 0.0)) {
      return "max_abs_error must be >= 0";
    }
  }
  if (r.timing) {
    if (!r.tests) return "timing present without tests";
    if (r.tests->passed != r.tests->total) return "timing present on failed tests";
    if (r.timing->runs < 1) return "timing.runs must be >= 1";
    if (!(r.timing->mean_ms > 0.0)) return "timing.mean_ms must be > 0";
    if (!(r.timing->std_ms >= 0.0)) return "timing.std_ms must be >= 0";
  }
  return {};
}

EvaluationResult decode_response(std::string_view line) {
  const Json j = parse_line(line);
  if (!j.is_object()) throw ProtocolError("reply must be a JSON object");
  check_version(j);
  for (const char* key : {"compile", "tests", "timing", "error"}) require(j, key);

  EvaluationResult r;
  try {
    const auto& c = j.at("compile");
    if (c.is_null()) {
      if (j.at("error").is_null()) throw ProtocolError("compile is null without an error");
    } else {
      r.compile_ok = require(c, "ok").get<bool>();
      r.compile_log = c.value("log", std::string{});
    }
    if (!j.at("tests").is_null()) {
      const auto& t = j.at("tests");
      TestResults tr;
      tr.passed = require(t, "passed").get<int>();
      tr.total = require(t, "total").get<int>();
      if (auto it = t.find("max_abs_error"); it != t.end() && !it->is_null()) {
        tr.max_abs_error = it->get<double>();
      }
      r.tests = tr;
    }
    if (!j.at("timing").is_null()) {
      const auto& t = j.at("timing");
      TimingStats ts;
      ts.runs = require(t, "runs").get<int>();
      ts.warmup_runs = t.value("warmup_runs", 0);
      ts.mean_ms = require(t, "mean_ms").get<double>();
      ts.std_ms = require(t, "std_ms").get<double>();
      r.timing = ts;
    }
    if (!j.at("error").is_null()) {
      const auto& e = j.at("error");
      StageError se;
      se.stage = require(e, "stage").get<std::string>();
      se.reason = require(e, "reason").get<std::string>();
      se.message = e.value("message", std::string{});
      r.error = se;
    }
  } catch (const Json::exception& e) {
    throw ProtocolError(fmt::format("bad reply field: {}", e.what()));
  }
  if (auto why = gating_violation(r); !why.empty()) {
    throw ProtocolError(fmt::format("reply violates stage gating: {}", why));
  }
  return r;
}

int serve_synthetic(std::istream& in, std::ostream& out, const SyntheticRules& rules) {
  rules.validate();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string reply;
    try {
      const EvalRequest req = decode_request(line);
      if (req.code.empty()) throw ProtocolError("code must be non-empty");
      if (req.n_cases < 1) throw ProtocolError("n_cases must be >= 1");
      Task task;
      task.id = req.task_id;
      task.test_spec = {req.n_cases, req.input_seed, req.abs_tolerance, req.rel_tolerance};
      EvalConfig cfg;
      cfg.stages = req.stages;
      cfg.timing_runs = req.timing_runs;
      cfg.warmup_runs = req.warmup_runs;
      cfg.timeouts = req.timeouts;
      cfg.evaluator = rules;
      cfg.validate();
      reply = encode_reply(evaluate_synthetic(req.code, task, cfg, rules));
    } catch (const Error& e) {
      reply = encode_error_reply({"request", "malformed", e.what()});
    }
    out << reply << '\n' << std::flush;
  }
  return 0;
}

}  // namespace kevo
