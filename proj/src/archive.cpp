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

#include "kevo/archive.hpp"

#include <fmt/core.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <sstream>

#include "kevo/hashing.hpp"

namespace kevo {

namespace fs = std::filesystem;

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> opt_get(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

ArchiveHeader header_from_json(const Json& j) {
  ArchiveHeader h;
  if (j.at("format").get<std::string>() != kArchiveFormat) {
    throw ArchiveError(fmt::format("unsupported archive format '{}'",
                                   j.at("format").get<std::string>()));
  }
  h.run_id = j.at("run_id").get<std::string>();
  h.strategy = j.at("strategy").get<std::string>();
  h.model_name = j.at("model_name").get<std::string>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.repeat_index = j.at("repeat_index").get<int>();
  h.template_sha256 = j.value("template_sha256", std::string{});
  h.task = j.at("task").get<Task>();
  h.config = j.at("config");
  h.started_at = j.value("started_at", std::string{});
  return h;
}

TrialRecord record_from_json(const Json& j) {
  TrialRecord r;
  r.candidate = j.at("candidate").get<Candidate>();
  r.prompt_sha256 = j.value("prompt_sha256", std::string{});
  r.attempts = j.value("attempts", 0);
  r.error = opt_get<std::string>(j, "error");
  r.feedback = opt_get<std::string>(j, "feedback");
  r.latency_ms = j.value("latency_ms", 0.0);
  r.started_at = j.value("started_at", std::string{});
  r.finished_at = j.value("finished_at", std::string{});
  return r;
}

ArchiveFooter footer_from_json(const Json& j) {
  ArchiveFooter f;
  f.status = j.at("status").get<std::string>();
  if (f.status != "complete" && f.status != "aborted") {
    throw ArchiveError(fmt::format("unknown footer status '{}'", f.status));
  }
  f.abort_reason = opt_get<std::string>(j, "abort_reason");
  if (j.contains("aborted_usage")) f.aborted_usage = j.at("aborted_usage").get<TokenUsage>();
  f.trials_used = j.at("trials_used").get<std::size_t>();
  f.tokens = j.at("tokens").get<TokenUsage>();
  f.cost_usd = opt_get<double>(j, "cost_usd");
  f.population = j.value("population", std::vector<std::vector<std::string>>{});
  f.finished_at = j.value("finished_at", std::string{});
  return f;
}

Json strip_wall_clock(Json j) {
  for (const char* key : {"started_at", "finished_at", "latency_ms"}) j.erase(key);
  return j;
}

}  // namespace

TokenUsage RunArchive::total_tokens() const {
  TokenUsage t;
  for (const auto& r : records) t += r.candidate.tokens;
  if (footer) t += footer->aborted_usage;
  return t;
}

Json header_to_json(const ArchiveHeader& h) {
  return Json{{"type", "header"},
              {"format", kArchiveFormat},
              {"run_id", h.run_id},
              {"strategy", h.strategy},
              {"model_name", h.model_name},
              {"seed", h.seed},
              {"repeat_index", h.repeat_index},
              {"template_sha256", h.template_sha256},
              {"task", h.task},
              {"config", h.config},
              {"started_at", h.started_at}};
}

Json record_to_json(const TrialRecord& r) {
  return Json{{"type", "trial"},
              {"trial_index", r.candidate.trial_index},
              {"candidate", r.candidate},
              {"prompt_sha256", r.prompt_sha256},
              {"attempts", r.attempts},
              {"error", opt(r.error)},
              {"feedback", opt(r.feedback)},
              {"latency_ms", r.latency_ms},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at}};
}

Json footer_to_json(const ArchiveFooter& f) {
  return Json{{"type", "footer"},
              {"status", f.status},
              {"abort_reason", opt(f.abort_reason)},
              {"aborted_usage", f.aborted_usage},
              {"trials_used", f.trials_used},
              {"tokens", f.tokens},
              {"cost_usd", opt(f.cost_usd)},
              {"population", f.population},
              {"finished_at", f.finished_at}};
}

void check_record_sequence(const RunArchive& archive) {
  for (std::size_t i = 0; i < archive.records.size(); ++i) {
    if (archive.records[i].candidate.trial_index != i) {
      throw ArchiveError(fmt::format("trial record {} has trial_index {}", i,
                                     archive.records[i].candidate.trial_index));
    }
  }
}

ArchiveWriter::ArchiveWriter(const std::string& path) : path_(path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw ArchiveError(fmt::format("cannot write archive '{}'", path));
}

void ArchiveWriter::begin(const ArchiveHeader& header,
                          const std::vector<TrialRecord>& existing) {
  write_line(header_to_json(header));
  for (const auto& r : existing) write_line(record_to_json(r));
}

void ArchiveWriter::write_line(const Json& j) {
  out_ << j.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
  out_.flush();
  if (!out_) throw ArchiveError(fmt::format("write to '{}' failed", path_));
}

void ArchiveWriter::append(const TrialRecord& record) { write_line(record_to_json(record)); }

void ArchiveWriter::finish(const ArchiveFooter& footer) { write_line(footer_to_json(footer)); }

void write_archive(const std::string& path, const RunArchive& archive) {
  ArchiveWriter w(path);
  w.begin(archive.header, archive.records);
  if (archive.footer) w.finish(*archive.footer);
}

LoadedArchive parse_archive(std::string_view text) {
  LoadedArchive out;
  bool have_header = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const bool torn = nl == std::string_view::npos;
    const std::string_view line = text.substr(pos, torn ? std::string_view::npos : nl - pos);
    pos = torn ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (out.archive.footer) {
      throw ArchiveError(fmt::format("line {}: content after footer", line_no));
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      if (torn && have_header) {
        out.warnings.push_back(fmt::format("line {}: dropped torn final line", line_no));
        break;
      }
      throw ArchiveError(fmt::format("line {}: {}", line_no, e.what()));
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw ArchiveError("first line is not a header");
        out.archive.header = header_from_json(j);
        have_header = true;
      } else if (type == "trial") {
        out.archive.records.push_back(record_from_json(j));
      } else if (type == "footer") {
        out.archive.footer = footer_from_json(j);
      } else {
        throw ArchiveError(fmt::format("unexpected line type '{}'", type));
      }
    } catch (const Error& e) {
      throw ArchiveError(fmt::format("line {}: {}", line_no, e.what()));
    } catch (const Json::exception& e) {
      throw ArchiveError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (!have_header) throw ArchiveError("archive has no header");
  check_record_sequence(out.archive);
  return out;
}

LoadedArchive load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError(fmt::format("cannot open archive '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_archive(ss.str());
  } catch (const ArchiveError& e) {
    throw ArchiveError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string canonical_hash(const RunArchive& archive) {
  const auto line = [](const Json& j) {
    return strip_wall_clock(j).dump(-1, ' ', false, Json::error_handler_t::replace) + '\n';
  };
  std::string buf = line(header_to_json(archive.header));
  for (const auto& r : archive.records) buf += line(record_to_json(r));
  if (archive.footer) buf += line(footer_to_json(*archive.footer));
  return sha256_hex(buf);
}

std::string archive_path(const std::string& out_dir, const std::string& run_id,
                         const std::string& task_id) {
  return (fs::path(out_dir) / run_id / (task_id + ".jsonl")).string();
}

std::string utc_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900,
                     tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

}  // namespace kevo
