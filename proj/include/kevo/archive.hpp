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

// Append-only JSONL run archive: a header line, one line per trial, and a
// footer line once the run completes or aborts. Every prefix that ends on a
// line boundary is itself a loadable (partial) archive.

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "kevo/core.hpp"
#include "kevo/json_io.hpp"

namespace kevo {

inline constexpr std::string_view kArchiveFormat = "kevo-archive/1";

struct ArchiveHeader {
  std::string run_id;
  std::string strategy;
  std::string model_name;
  std::uint64_t seed = 0;
  int repeat_index = 0;
  std::string template_sha256;
  Task task;
  Json config;  // search_snapshot() of the run config
  std::string started_at;

  bool operator==(const ArchiveHeader&) const = default;
};

struct TrialRecord {
  Candidate candidate;
  std::string prompt_sha256;
  int attempts = 0;
  std::optional<std::string> error;     // generation/evaluation failure text
  std::optional<std::string> feedback;  // handed to the next trial's prompt
  double latency_ms = 0.0;
  std::string started_at;
  std::string finished_at;

  bool operator==(const TrialRecord&) const = default;
};

struct ArchiveFooter {
  std::string status;  // "complete" or "aborted"
  std::optional<std::string> abort_reason;
  TokenUsage aborted_usage;  // spent on the attempt that aborted the run
  std::size_t trials_used = 0;
  TokenUsage tokens;
  std::optional<double> cost_usd;
  std::vector<std::vector<std::string>> population;  // member ids per island
  std::string finished_at;

  bool operator==(const ArchiveFooter&) const = default;
};

struct RunArchive {
  ArchiveHeader header;
  std::vector<TrialRecord> records;
  std::optional<ArchiveFooter> footer;

  bool complete() const { return footer && footer->status == "complete"; }
  bool aborted() const { return footer && footer->status == "aborted"; }
  // Usage over every trial record plus any aborted attempt.
  TokenUsage total_tokens() const;

  bool operator==(const RunArchive&) const = default;
};

Json header_to_json(const ArchiveHeader& h);
Json record_to_json(const TrialRecord& r);
Json footer_to_json(const ArchiveFooter& f);

// Trial indices must be 0..n-1 in order. Throws ArchiveError.
void check_record_sequence(const RunArchive& archive);

// Writes lines as the search proceeds and flushes after each one.
class ArchiveWriter {
 public:
  // Creates parent directories and truncates path.
  explicit ArchiveWriter(const std::string& path);

  // Header plus any records already decided (used when resuming).
  void begin(const ArchiveHeader& header, const std::vector<TrialRecord>& existing = {});
  void append(const TrialRecord& record);
  void finish(const ArchiveFooter& footer);
  const std::string& path() const { return path_; }

 private:
  void write_line(const Json& j);

  std::string path_;
  std::ofstream out_;
};

void write_archive(const std::string& path, const RunArchive& archive);

struct LoadedArchive {
  RunArchive archive;
  std::vector<std::string> warnings;
};

// Tolerates a torn final line (no trailing newline) with a warning; any other
// malformed line throws ArchiveError.
LoadedArchive load_archive(const std::string& path);
LoadedArchive parse_archive(std::string_view text);

// SHA-256 over the archive with wall-clock fields (timestamps, latencies)
// removed. Equal for runs that made identical decisions.
std::string canonical_hash(const RunArchive& archive);

// <out_dir>/<run_id>/<task_id>.jsonl
std::string archive_path(const std::string& out_dir, const std::string& run_id,
                         const std::string& task_id);

// ISO-8601 UTC timestamp with millisecond precision.
std::string utc_now();

}  // namespace kevo
