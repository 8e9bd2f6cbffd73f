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

#include "kevo/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

namespace kevo {

namespace fs = std::filesystem;

ArchiveScan scan_archives(const std::string& dir) {
  ArchiveScan scan;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return scan;
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      auto loaded = load_archive(path);
      for (auto& w : loaded.warnings) scan.warnings.push_back(fmt::format("{}: {}", path, w));
      if (!loaded.archive.footer) {
        scan.warnings.push_back(fmt::format("{}: no footer, run still in progress", path));
        continue;
      }
      scan.archives.push_back(std::move(loaded.archive));
      scan.paths.push_back(path);
    } catch (const Error& e) {
      scan.warnings.push_back(fmt::format("{}: skipped ({})", path, e.what()));
    }
  }
  return scan;
}

std::string method_key(const ArchiveHeader& header) {
  return fmt::format("{}/{}", header.strategy, header.model_name);
}

ReportSet build_reports(const std::vector<RunArchive>& archives, const PriceTable& prices) {
  ReportSet set;
  const auto outcomes = task_outcomes(archives, prices);
  // method -> run id -> outcome indices
  std::map<std::string, std::map<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < archives.size(); ++i) {
    const auto& h = archives[i].header;
    groups[method_key(h)][h.run_id].push_back(i);
    set.tokens.push_back({method_key(h), h.run_id, h.task.id, outcomes[i].tokens,
                          outcomes[i].cost_usd});
  }
  for (const auto& [method, runs] : groups) {
    std::vector<MethodReport> per_run;
    for (const auto& [run_id, idx] : runs) {
      std::vector<TaskOutcome> subset;
      for (auto i : idx) subset.push_back(outcomes[i]);
      per_run.push_back(build_report(method, subset));
    }
    set.methods.push_back(aggregate_runs(per_run));
  }
  return set;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_cost(const std::optional<double>& c) {
  return c ? fmt::format("{:.6f}", *c) : std::string("NA");
}

std::ofstream open_out(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / name, std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}/{}", out_dir, name));
  return out;
}

}  // namespace

void write_csv_reports(const ReportSet& set, const std::string& out_dir) {
  auto summary = open_out(out_dir, "summary.csv");
  summary << "method,group,tasks,runs,speedup_count_mean,speedup_count_per_run,"
             "median_speedup,compile_pass1,functional_pass1,cost_usd_mean\n";
  for (const auto& m : set.methods) {
    for (const auto& r : m.rows) {
      summary << fmt::format("{},{},{},{},{:.4f},{},{:.4f},{:.4f},{:.4f},{}\n",
                             csv_field(m.method), r.group, r.tasks, m.runs, r.speedup_count,
                             fmt::join(r.speedup_count_per_run, ";"), r.median_speedup,
                             r.compile_pass1, r.functional_pass1, opt_cost(r.total_cost));
    }
  }
  auto buckets = open_out(out_dir, "buckets.csv");
  buckets << "method,group,bucket,count_mean\n";
  const auto labels = bucket_labels();
  for (const auto& m : set.methods) {
    for (const auto& r : m.rows) {
      for (std::size_t b = 0; b < r.buckets.size() && b < labels.size(); ++b) {
        buckets << fmt::format("{},{},{},{:.4f}\n", csv_field(m.method), r.group, labels[b],
                               r.buckets[b]);
      }
    }
  }
  auto tokens = open_out(out_dir, "tokens.csv");
  tokens << "method,run_id,task_id,input_tokens,output_tokens,cost_usd\n";
  for (const auto& t : set.tokens) {
    tokens << fmt::format("{},{},{},{},{},{}\n", csv_field(t.method), csv_field(t.run_id),
                          csv_field(t.task_id), t.tokens.input_tokens, t.tokens.output_tokens,
                          opt_cost(t.cost_usd));
  }
}

std::string render_markdown(const ReportSet& set) {
  std::string md = "# Search report\n";
  const auto labels = bucket_labels();
  for (const auto& m : set.methods) {
    md += fmt::format("\n## {}\n\n{} task(s), {} run(s)\n\n", m.method, m.task_ids.size(),
                      m.runs);
    md += "| group | tasks | speedup count | per run | median speedup | compile pass@1 "
          "| functional pass@1 | cost (USD) |\n";
    md += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : m.rows) {
      md += fmt::format("| {} | {} | {:.2f} | {} | {:.3f} | {:.3f} | {:.3f} | {} |\n", r.group,
                        r.tasks, r.speedup_count, fmt::join(r.speedup_count_per_run, ", "),
                        r.median_speedup, r.compile_pass1, r.functional_pass1,
                        opt_cost(r.total_cost));
    }
    md += fmt::format("\n| group | {} |\n|---|", fmt::join(labels, " | "));
    for (std::size_t i = 0; i < labels.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& r : m.rows) {
      md += fmt::format("| {} | {:.2f} |\n", r.group, fmt::join(r.buckets, " | "));
    }
  }
  return md;
}

void write_markdown_report(const ReportSet& set, const std::string& out_dir) {
  auto out = open_out(out_dir, "report.md");
  out << render_markdown(set);
}

}  // namespace kevo
