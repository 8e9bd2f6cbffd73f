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

#include <sys/types.h>

#include <string>

#include "kevo/evaluator.hpp"

namespace kevo {

// Talks evoeval/1 to a long-running child process. The child is started on
// first use and restarted after a crash or a timeout. One instance per task
// loop; not thread-safe.
class SubprocessEvaluator final : public Evaluator {
 public:
  explicit SubprocessEvaluator(SubprocessSpec spec);
  ~SubprocessEvaluator() override;
  SubprocessEvaluator(const SubprocessEvaluator&) = delete;
  SubprocessEvaluator& operator=(const SubprocessEvaluator&) = delete;

  // A reply that does not arrive within the summed stage budgets yields a
  // result with error.reason == "timeout"; the child is killed.
  EvaluationResult evaluate(std::string_view code, const Task& task,
                            const EvalConfig& cfg) override;

  // Sends one raw line and returns the raw reply line. Throws EvaluatorFault
  // on EOF or crash. On timeout sets *timed_out, kills the child and returns
  // an empty string.
  std::string round_trip(const std::string& line, double timeout_s, bool* timed_out);

  pid_t pid() const { return pid_; }

 private:
  void start();
  void stop(bool force);

  SubprocessSpec spec_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace kevo
