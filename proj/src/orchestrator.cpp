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

#include "kevo/orchestrator.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <exception>

#include "kevo/hashing.hpp"

namespace kevo {

namespace {

// Cuts at most `limit` bytes without splitting a UTF-8 sequence.
std::string utf8_head(std::string_view s, std::size_t limit) {
  if (s.size() <= limit) return std::string(s);
  std::size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut));
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

ArchiveHeader make_header(const Task& task, const RunConfig& cfg, const PromptTemplate& tmpl,
                          std::string run_id, int repeat_index, std::string started_at) {
  ArchiveHeader h;
  h.run_id = std::move(run_id);
  h.strategy = std::string(to_string(cfg.strategy.name));
  h.model_name = cfg.generation_params.model_name;
  h.seed = cfg.seed;
  h.repeat_index = repeat_index;
  h.template_sha256 = sha256_hex(tmpl.text());
  h.task = task;
  h.config = search_snapshot(cfg);
  h.started_at = std::move(started_at);
  return h;
}

}  // namespace

std::string make_run_id(const RunConfig& cfg, std::uint64_t seed) {
  return fmt::format("{}_{}_seed{}", to_string(cfg.strategy.name),
                     sanitize(cfg.generation_params.model_name), seed);
}

std::optional<std::string> feedback_for(const Candidate& cand,
                                        const std::optional<std::string>& error,
                                        std::size_t limit) {
  std::string text;
  switch (cand.status) {
    case Status::kValid:
    case Status::kPending:
      return std::nullopt;
    case Status::kCompileError:
      text = cand.eval ? cand.eval->compile_log : std::string{};
      if (text.empty()) text = "Compilation failed without a log.";
      break;
    case Status::kTestFailure: {
      const auto& t = *cand.eval->tests;
      text = fmt::format("Functional tests failed: {}/{} cases passed", t.passed, t.total);
      if (t.max_abs_error) text += fmt::format(", max abs error {:.6g}", *t.max_abs_error);
      text += '.';
      break;
    }
    case Status::kTimeout:
      text = fmt::format("Evaluation timed out: {}",
                         cand.eval && cand.eval->error ? cand.eval->error->message : "");
      break;
    case Status::kRuntimeError:
      text = fmt::format("Evaluation failed: {}",
                         error ? *error
                               : (cand.eval && cand.eval->error ? cand.eval->error->message
                                                                : std::string("unknown error")));
      break;
    case Status::kParseError:
      text = "The previous reply contained no fenced code block. Return the full source "
             "inside one ``` block.";
      break;
    case Status::kEmptyCompletion:
      text = "The previous reply was empty.";
      break;
  }
  return utf8_head(text, limit);
}

SearchLoop::SearchLoop(const Task& task, RunConfig cfg, SearchServices services,
                       std::string run_id, int repeat_index, Unstarted)
    : task_(task),
      cfg_(std::move(cfg)),
      services_(std::move(services)),
      population_(cfg_.strategy.population),
      insights_(cfg_.insight_capacity) {
  cfg_.validate();
  if (auto problems = validate_task(task_); !problems.empty()) {
    throw ContractViolation(fmt::format("task '{}' is invalid: {}", task_.id, problems.front()));
  }
  archive_.header = make_header(task_, cfg_, services_.prompt_template, std::move(run_id),
                                repeat_index, services_.clock());
}

SearchLoop::SearchLoop(const Task& task, RunConfig cfg, SearchServices services,
                       std::string run_id, int repeat_index, bool begin_archive)
    : SearchLoop(task, std::move(cfg), std::move(services), std::move(run_id), repeat_index, Unstarted{}) {
  if (begin_archive && services_.writer != nullptr) services_.writer->begin(archive_.header);
}

SearchLoop SearchLoop::from_archive(const RunArchive& archive, const Task& task, RunConfig cfg,
                                    SearchServices services) {
  ArchiveWriter* writer = services.writer;
  services.writer = nullptr;
  SearchLoop loop(task, std::move(cfg), std::move(services), archive.header.run_id,
                  archive.header.repeat_index, Unstarted{});
  const auto& want = loop.archive_.header;
  const auto& have = archive.header;
  if (have.config != want.config) {
    throw ResumeConfigMismatch(fmt::format(
        "archive {} was produced by a different run config ({} vs {})", have.run_id,
        have.config.value("strategy", std::string("?")), want.strategy));
  }
  if (have.task != want.task) {
    throw ResumeConfigMismatch(fmt::format("archive {} belongs to task '{}', not '{}'",
                                           have.run_id, have.task.id, task.id));
  }
  if (have.template_sha256 != want.template_sha256) {
    throw ResumeConfigMismatch(
        fmt::format("archive {} was rendered with a different prompt template", have.run_id));
  }
  if (archive.records.size() > loop.cfg_.budget_trials) {
    throw ResumeConfigMismatch(fmt::format("archive {} holds {} trials, budget is {}",
                                           have.run_id, archive.records.size(),
                                           loop.cfg_.budget_trials));
  }
  check_record_sequence(archive);
  loop.archive_.header = have;
  for (const auto& r : archive.records) loop.apply(r);
  if (writer != nullptr) {
    writer->begin(loop.archive_.header, loop.archive_.records);
    loop.services_.writer = writer;
  }
  return loop;
}

bool SearchLoop::done() const { return trials_used() >= cfg_.budget_trials; }

void SearchLoop::commit_pending() {
  for (const auto& c : pending_) population_.insert(c);
  pending_.clear();
}

void SearchLoop::apply(const TrialRecord& record) {
  const auto& cand = record.candidate;
  if (current_generation_ != cand.generation) {
    commit_pending();
    current_generation_ = cand.generation;
  }
  if (cand.status == Status::kValid && cand.fitness) pending_.push_back(cand);
  if (cfg_.strategy.use_insights && cand.insight) insights_.add(*cand.insight);
  last_feedback_ = record.feedback;
  archive_.records.push_back(record);
  if (services_.writer != nullptr) services_.writer->append(record);
}

void SearchLoop::step() {
  if (done()) throw ContractViolation("step called after the trial budget was spent");
  const std::size_t t = trials_used();
  const std::size_t generation = cfg_.generation_of(t);
  if (current_generation_ != generation) {
    commit_pending();
    current_generation_ = generation;
  }

  TrialRecord rec;
  rec.started_at = services_.clock();
  Candidate& cand = rec.candidate;
  cand.trial_index = t;
  cand.generation = generation;

  const PromptContext ctx = build_context(
      cfg_.strategy, ContextInputs{task_, population_, insights_, last_feedback_, t});
  cand.parent_ids = ctx.source_ids;
  last_prompt_ = render_prompt(ctx, services_.prompt_template);
  rec.prompt_sha256 = sha256_hex(last_prompt_);

  const auto start = std::chrono::steady_clock::now();
  std::optional<std::string> reply;
  try {
    auto gen = generate(services_.backend, last_prompt_, cfg_.generation_params, t,
                        services_.retry);
    rec.attempts = gen.attempts;
    cand.tokens = gen.total_usage;
    reply = std::move(gen.completion.text);
  } catch (const EmptyCompletion& e) {
    rec.attempts = e.attempts();
    cand.tokens = e.usage();
    cand.status = Status::kEmptyCompletion;
    rec.error = e.what();
  }

  if (reply) {
    try {
      const ParsedOutput parsed = parse_response(*reply);
      cand.code = parsed.code;
      if (parsed.insight) cand.insight = Insight{*parsed.insight, {}, std::nullopt};
    } catch (const ParseError& e) {
      cand.status = Status::kParseError;
      rec.error = e.what();
    }
  }
  cand.id = candidate_id(t, cand.code);
  if (cand.insight) cand.insight->source_candidate = cand.id;

  if (cand.status == Status::kPending) {
    try {
      cand.eval = services_.evaluator.evaluate(cand.code, task_, cfg_.eval_config);
      cand.status = classify(*cand.eval);
      if (cand.status == Status::kValid && cand.eval->timing) {
        cand.fitness = speedup(task_.baseline_mean_ms, cand.eval->timing->mean_ms);
        if (cand.insight) cand.insight->fitness_at_creation = cand.fitness;
      }
      if (cand.eval->error) rec.error = cand.eval->error->message;
    } catch (const EvaluatorFault& e) {
      cand.status = Status::kRuntimeError;
      rec.error = e.what();
    } catch (const ProtocolError& e) {
      cand.status = Status::kRuntimeError;
      rec.error = e.what();
    }
  }

  rec.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  rec.feedback = feedback_for(cand, rec.error, cfg_.feedback_limit);
  rec.finished_at = services_.clock();
  apply(rec);
}

ArchiveFooter SearchLoop::make_footer(std::string status, std::optional<std::string> reason,
                                      TokenUsage aborted_usage) {
  ArchiveFooter f;
  f.status = std::move(status);
  f.abort_reason = std::move(reason);
  f.aborted_usage = aborted_usage;
  f.trials_used = trials_used();
  for (const auto& r : archive_.records) f.tokens += r.candidate.tokens;
  f.tokens += aborted_usage;
  if (cfg_.prices.contains(cfg_.generation_params.model_name)) {
    f.cost_usd = cost(f.tokens, cfg_.generation_params.model_name, cfg_.prices);
  }
  for (const auto& island : population_.islands()) {
    auto& ids = f.population.emplace_back();
    for (const auto& c : island) ids.push_back(c.id);
  }
  f.finished_at = services_.clock();
  return f;
}

RunArchive SearchLoop::run() {
  try {
    while (!done()) step();
  } catch (const BackendUnavailable& e) {
    commit_pending();
    archive_.footer = make_footer("aborted", e.what(), e.usage());
    if (services_.writer != nullptr) services_.writer->finish(*archive_.footer);
    return archive_;
  } catch (const ScriptExhausted& e) {
    commit_pending();
    archive_.footer = make_footer("aborted", e.what(), {});
    if (services_.writer != nullptr) services_.writer->finish(*archive_.footer);
    return archive_;
  }
  commit_pending();
  archive_.footer = make_footer("complete", std::nullopt, {});
  if (services_.writer != nullptr) services_.writer->finish(*archive_.footer);
  return archive_;
}

RunArchive run_search(const Task& task, const RunConfig& cfg, SearchServices services,
                      int repeat_index) {
  SearchLoop loop(task, cfg, std::move(services), make_run_id(cfg, cfg.seed), repeat_index);
  return loop.run();
}

RunArchive resume(const RunArchive& archive, const Task& task, const RunConfig& cfg,
                  SearchServices services) {
  if (archive.complete()) {
    // Still reject a foreign config so a mismatched resume is never silent.
    SearchLoop::from_archive(RunArchive{archive.header, {}, std::nullopt}, task, cfg,
                             SearchServices{services.backend, services.evaluator,
                                            services.prompt_template, nullptr,
                                            services.retry, services.clock});
    return archive;
  }
  RunArchive partial = archive;
  partial.footer.reset();
  auto loop = SearchLoop::from_archive(partial, task, cfg, std::move(services));
  return loop.run();
}

std::vector<BatchJob> run_batch(const std::vector<Task>& tasks, const RunConfig& cfg,
                                const BatchOptions& options) {
  std::vector<BatchJob> jobs;
  for (int r = 0; r < cfg.runs_repeat; ++r) {
    for (const auto& t : tasks) jobs.push_back(BatchJob{t.id, r, {}, false, {}});
  }
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  const int threads = std::max(1, options.parallel_tasks);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    BatchJob& job = jobs[i];
    const Task& task = *std::find_if(tasks.begin(), tasks.end(),
                                     [&](const Task& t) { return t.id == job.task_id; });
    try {
      RunConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(job.repeat_index);
      const std::string run_id = make_run_id(run_cfg, run_cfg.seed);
      job.archive_path = archive_path(options.out_dir, run_id, task.id);
      auto backend = options.make_backend(run_cfg.seed);
      auto evaluator = options.make_evaluator();
      ArchiveWriter writer(job.archive_path);
      SearchLoop loop(task, run_cfg,
                      SearchServices{*backend, *evaluator, *options.prompt_template, &writer,
                                     options.retry},
                      run_id, job.repeat_index);
      job.aborted = loop.run().aborted();
    } catch (const std::exception& e) {
      job.error = e.what();
    }
  }
  return jobs;
}

}  // namespace kevo
