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

// Collects archives from a directory tree and renders per-method tables.

#pragma once

#include <string>
#include <vector>

#include "kevo/archive.hpp"
#include "kevo/llm_backend.hpp"
#include "kevo/metrics.hpp"

namespace kevo {

struct ArchiveScan {
  std::vector<RunArchive> archives;
  std::vector<std::string> paths;
  std::vector<std::string> warnings;  // skipped or partially read files
};

// Every *.jsonl below dir, in sorted path order. Corrupt files and archives
// without a footer are skipped with a warning.
ArchiveScan scan_archives(const std::string& dir);

// "<strategy>/<model>"
std::string method_key(const ArchiveHeader& header);

struct TokenRow {
  std::string method;
  std::string run_id;
  std::string task_id;
  TokenUsage tokens;
  std::optional<double> cost_usd;
};

struct ReportSet {
  std::vector<MethodReport> methods;  // sorted by method key
  std::vector<TokenRow> tokens;
};

// Groups by method, then by run id; each run is reported alone and the runs
// of one method are averaged.
ReportSet build_reports(const std::vector<RunArchive>& archives, const PriceTable& prices);

// summary.csv, buckets.csv and tokens.csv under out_dir.
void write_csv_reports(const ReportSet& set, const std::string& out_dir);
// report.md under out_dir.
void write_markdown_report(const ReportSet& set, const std::string& out_dir);
std::string render_markdown(const ReportSet& set);

}  // namespace kevo
