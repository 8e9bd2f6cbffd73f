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

// kevo: command-line front end for running, resuming and reporting searches.

#include <fmt/core.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kevo/archive.hpp"
#include "kevo/evaluator.hpp"
#include "kevo/json_io.hpp"
#include "kevo/orchestrator.hpp"
#include "kevo/protocol.hpp"
#include "kevo/remote_backend.hpp"
#include "kevo/report.hpp"
#include "kevo/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct UsageError : kevo::Error {
  using kevo::Error::Error;
};

struct CommonFlags {
  std::string config_path;
  std::string tasks_path;
  std::string backend;
  std::string evaluator;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Run configuration (JSON)")->required();
  cmd->add_option("--tasks", f.tasks_path, "Task file; overrides the config");
  cmd->add_option("--backend", f.backend, "scripted:<path> or remote");
  cmd->add_option("--evaluator", f.evaluator, "synthetic or subprocess:<command>");
  cmd->add_option("--seed", f.seed, "Base seed; overrides the config");
}

kevo::RunConfig resolve_config(const CommonFlags& f) {
  auto cfg = kevo::load_run_config(f.config_path);
  if (!f.tasks_path.empty()) cfg.tasks_file = f.tasks_path;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.backend.empty()) {
    std::string corpus;
    cfg.backend.kind = kevo::parse_backend_flag(f.backend, &corpus);
    cfg.backend.corpus_path = corpus;
  }
  if (!f.evaluator.empty()) {
    if (f.evaluator == "synthetic") {
      cfg.eval_config.evaluator = kevo::SyntheticRules{};
    } else if (f.evaluator.rfind("subprocess:", 0) == 0 && f.evaluator.size() > 11) {
      cfg.eval_config.evaluator = kevo::SubprocessSpec{f.evaluator.substr(11), {}};
    } else {
      throw kevo::ConfigError(fmt::format("unknown evaluator '{}'", f.evaluator));
    }
  }
  cfg.validate();
  return cfg;
}

// Backend factory keyed by effective seed. Scripted corpora are read once;
// a remote backend is shared so its concurrency cap spans every task.
std::function<std::shared_ptr<kevo::CompletionBackend>(std::uint64_t)> backend_factory(
    const kevo::RunConfig& cfg) {
  if (cfg.backend.kind == kevo::BackendSpec::Kind::kRemote) {
    auto shared = std::make_shared<kevo::RemoteBackend>(cfg.backend.remote);
    return [shared](std::uint64_t) { return shared; };
  }
  if (cfg.backend.corpus_path.empty()) {
    throw kevo::ConfigError("scripted backend needs a corpus path");
  }
  auto corpus = std::make_shared<const kevo::ScriptedCorpus>(
      kevo::ScriptedCorpus::load(cfg.backend.corpus_path, cfg.backend.cycle));
  const bool shuffle = cfg.backend.shuffle;
  return [corpus, shuffle](std::uint64_t seed) -> std::shared_ptr<kevo::CompletionBackend> {
    return std::make_shared<kevo::ScriptedBackend>(shuffle ? corpus->permuted(seed) : *corpus);
  };
}

kevo::PromptTemplate resolve_template(const kevo::RunConfig& cfg) {
  return cfg.template_path.empty() ? kevo::PromptTemplate::canonical()
                                   : kevo::PromptTemplate::load(cfg.template_path);
}

int cmd_run(const CommonFlags& f, const std::string& task_sel, const std::string& out_dir,
            int parallel, std::optional<int> repeats) {
  auto cfg = resolve_config(f);
  if (repeats) cfg.runs_repeat = *repeats;
  if (cfg.runs_repeat < 1) throw kevo::ConfigError("--repeats must be >= 1");
  if (cfg.tasks_file.empty()) throw kevo::ConfigError("no task file given (--tasks or tasks_file)");
  auto tasks = kevo::load_tasks(cfg.tasks_file);
  if (auto problems = kevo::validate_task_set(tasks); !problems.empty()) {
    throw kevo::ConfigError(fmt::format("invalid task set: {}", problems.front()));
  }
  if (task_sel != "all") {
    auto it = std::find_if(tasks.begin(), tasks.end(),
                           [&](const kevo::Task& t) { return t.id == task_sel; });
    if (it == tasks.end()) throw UsageError(fmt::format("unknown task id '{}'", task_sel));
    tasks = {*it};
  }
  const auto tmpl = resolve_template(cfg);
  kevo::BatchOptions opts;
  opts.out_dir = out_dir;
  opts.parallel_tasks = parallel;
  opts.make_backend = backend_factory(cfg);
  const auto eval_cfg = cfg.eval_config;
  opts.make_evaluator = [eval_cfg] { return kevo::make_evaluator(eval_cfg); };
  opts.prompt_template = &tmpl;

  const auto jobs = kevo::run_batch(tasks, cfg, opts);
  int code = kExitOk;
  for (const auto& j : jobs) {
    if (!j.error.empty()) {
      std::cerr << fmt::format("kevo: task {} repeat {} failed: {}\n", j.task_id,
                               j.repeat_index, j.error);
      code = std::max(code, kExitFailure);
    } else if (j.aborted) {
      std::cerr << fmt::format("kevo: task {} repeat {} aborted, see {}\n", j.task_id,
                               j.repeat_index, j.archive_path);
      code = kExitBackend;
    } else {
      std::cout << j.archive_path << "\n";
    }
  }
  return code;
}

int cmd_resume(const CommonFlags& f, const std::string& archive_path) {
  auto loaded = kevo::load_archive(archive_path);
  for (const auto& w : loaded.warnings) std::cerr << "kevo: " << w << "\n";
  const auto& archive = loaded.archive;
  auto flags = f;
  flags.seed = archive.header.seed;
  auto cfg = resolve_config(flags);
  const auto tmpl = resolve_template(cfg);
  const kevo::Task task = archive.header.task;
  auto backend = backend_factory(cfg)(archive.header.seed);
  auto evaluator = kevo::make_evaluator(cfg.eval_config);
  if (archive.complete()) {
    // Nothing to run, but a foreign config is still an error.
    kevo::resume(archive, task, cfg, kevo::SearchServices{*backend, *evaluator, tmpl});
    std::cout << archive_path << "\n";
    return kExitOk;
  }
  kevo::ArchiveWriter writer(archive_path);
  const auto result = kevo::resume(archive, task, cfg,
                                   kevo::SearchServices{*backend, *evaluator, tmpl, &writer});
  if (result.aborted()) {
    std::cerr << fmt::format("kevo: run aborted again: {}\n",
                             result.footer->abort_reason.value_or("unknown"));
    return kExitBackend;
  }
  std::cout << archive_path << "\n";
  return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& format, std::string out_dir) {
  auto scan = kevo::scan_archives(dir);
  for (const auto& w : scan.warnings) std::cerr << "kevo: warning: " << w << "\n";
  if (scan.archives.empty()) throw UsageError(fmt::format("no archives found under {}", dir));
  if (out_dir.empty()) out_dir = dir;
  const auto set = kevo::build_reports(scan.archives, kevo::PriceTable::standard());
  if (format == "md") {
    kevo::write_markdown_report(set, out_dir);
  } else {
    kevo::write_csv_reports(set, out_dir);
  }
  return kExitOk;
}

int cmd_validate_task(const std::string& path) {
  const auto tasks = kevo::load_tasks(path);
  const auto problems = kevo::validate_task_set(tasks);
  for (const auto& p : problems) std::cout << p << "\n";
  if (!problems.empty()) return kExitUsage;
  std::cout << fmt::format("{} task(s) ok\n", tasks.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary kernel optimization search"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string task_sel = "all";
  std::string out_dir = "runs";
  int parallel = 1;
  std::optional<int> repeats;
  auto* run = app.add_subcommand("run", "Run searches and write archives");
  add_common(run, run_flags);
  run->add_option("--task", task_sel, "Task id or 'all'");
  run->add_option("--out", out_dir, "Archive root directory");
  run->add_option("--parallel-tasks", parallel, "Concurrent task loops")
      ->check(CLI::PositiveNumber);
  run->add_option("--repeats", repeats, "Independent runs; overrides the config");

  CommonFlags resume_flags;
  std::string archive_path;
  auto* res = app.add_subcommand("resume", "Continue an interrupted archive");
  add_common(res, resume_flags);
  res->add_option("--archive", archive_path, "Archive to continue")->required();

  std::string report_dir;
  std::string format = "csv";
  std::string report_out;
  auto* rep = app.add_subcommand("report", "Summarize archives");
  rep->add_option("--archives", report_dir, "Directory searched recursively for archives")
      ->required();
  rep->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  rep->add_option("--out", report_out, "Output directory (default: the archive directory)");

  std::string validate_path;
  auto* val = app.add_subcommand("validate-task", "Check a task file");
  val->add_option("--tasks", validate_path, "Task file")->required();

  auto* echo = app.add_subcommand("echo-eval", "Synthetic evaluator over the stdin/stdout protocol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, task_sel, out_dir, parallel, repeats);
    if (*res) return cmd_resume(resume_flags, archive_path);
    if (*rep) return cmd_report(report_dir, format, report_out);
    if (*val) return cmd_validate_task(validate_path);
    if (*echo) {
      std::ios::sync_with_stdio(false);
      return kevo::serve_synthetic(std::cin, std::cout, kevo::SyntheticRules{});
    }
  } catch (const UsageError& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kevo::ConfigError& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kevo::ResumeConfigMismatch& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kevo::TemplateError& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kevo::BackendUnavailable& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "kevo: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
