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

// The search loop. Each trial renders a prompt from the current population,
// insights and feedback, asks the backend for a candidate, evaluates it, and
// appends a record to the run archive. Trials within a task are sequential.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kevo/archive.hpp"
#include "kevo/evaluator.hpp"
#include "kevo/insight_store.hpp"
#include "kevo/llm_backend.hpp"
#include "kevo/population.hpp"
#include "kevo/run_config.hpp"
#include "kevo/traverse.hpp"

namespace kevo {

struct SearchServices {
  CompletionBackend& backend;
  Evaluator& evaluator;
  const PromptTemplate& prompt_template = PromptTemplate::canonical();
  ArchiveWriter* writer = nullptr;  // optional: persist every trial
  RetryPolicy retry;
  std::function<std::string()> clock = utc_now;
};

// Deterministic run id for (strategy, model, seed).
std::string make_run_id(const RunConfig& cfg, std::uint64_t seed);

// Feedback text for the next prompt, or nullopt for a Valid trial.
std::optional<std::string> feedback_for(const Candidate& cand,
                                        const std::optional<std::string>& error,
                                        std::size_t limit);

class SearchLoop {
 public:
  // Writes the archive header through services.writer when one is given.
  SearchLoop(const Task& task, RunConfig cfg, SearchServices services, std::string run_id,
             int repeat_index = 0, bool begin_archive = true);

  // Rebuilds population, insights and feedback from a partial archive, then
  // rewrites it through services.writer (if any) before new trials append.
  // Throws ResumeConfigMismatch when the archive came from another config,
  // task or template.
  static SearchLoop from_archive(const RunArchive& archive, const Task& task, RunConfig cfg,
                                 SearchServices services);

  bool done() const;
  // Runs exactly one trial. Throws BackendUnavailable / ScriptExhausted
  // without recording a trial; every other failure is recorded.
  void step();
  // Steps until the budget is spent. A backend failure ends the run with an
  // aborted footer instead of throwing.
  RunArchive run();

  const Population& population() const { return population_; }
  const InsightStore& insights() const { return insights_; }
  const std::optional<std::string>& last_feedback() const { return last_feedback_; }
  std::size_t trials_used() const { return archive_.records.size(); }
  const RunArchive& archive() const { return archive_; }
  // Most recent prompt, for inspection.
  const std::string& last_prompt() const { return last_prompt_; }

 private:
  struct Unstarted {};
  SearchLoop(const Task& task, RunConfig cfg, SearchServices services, std::string run_id,
             int repeat_index, Unstarted);

  void apply(const TrialRecord& record);
  void commit_pending();
  ArchiveFooter make_footer(std::string status, std::optional<std::string> reason,
                            TokenUsage aborted_usage);

  const Task& task_;
  RunConfig cfg_;
  SearchServices services_;
  Population population_;
  std::vector<Candidate> pending_;
  std::optional<std::size_t> current_generation_;
  InsightStore insights_;
  std::optional<std::string> last_feedback_;
  RunArchive archive_;
  std::string last_prompt_;
};

RunArchive run_search(const Task& task, const RunConfig& cfg, SearchServices services,
                      int repeat_index = 0);

// Continues a partial archive to the budget. A complete archive is returned
// unchanged.
RunArchive resume(const RunArchive& archive, const Task& task, const RunConfig& cfg,
                  SearchServices services);

struct BatchJob {
  std::string task_id;
  int repeat_index = 0;
  std::string archive_path;
  bool aborted = false;
  std::string error;  // set when the job failed before producing an archive
};

struct BatchOptions {
  std::string out_dir = "runs";
  int parallel_tasks = 1;
  // Backend for a given effective seed; may be shared between jobs.
  std::function<std::shared_ptr<CompletionBackend>(std::uint64_t seed)> make_backend;
  std::function<std::unique_ptr<Evaluator>()> make_evaluator;
  const PromptTemplate* prompt_template = &PromptTemplate::canonical();
  RetryPolicy retry;
};

// Runs every (task, repeat) pair, up to parallel_tasks at a time, each with
// a private evaluator and archive file. Repeat r uses seed cfg.seed + r.
std::vector<BatchJob> run_batch(const std::vector<Task>& tasks, const RunConfig& cfg,
                                const BatchOptions& options);

}  // namespace kevo
