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

// Brute-force reference implementations. These deliberately avoid the
// library's own helpers so a shared bug cannot hide in both.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kevo/archive.hpp"

namespace kevo::oracle {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline std::size_t occurrences(const std::string& text, const std::string& token) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + token.size() <= text.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < token.size(); ++k) {
      if (text[i + k] != token[k]) {
        match = false;
        break;
      }
    }
    if (match) {
      ++n;
      i += token.size() - 1;
    }
  }
  return n;
}

// Best speedup of one archive computed straight from records.
inline std::optional<double> best_speedup(const RunArchive& a) {
  std::optional<double> best;
  for (const auto& r : a.records) {
    if (r.candidate.status != Status::kValid) continue;
    const double s = a.header.task.baseline_mean_ms / r.candidate.eval->timing->mean_ms;
    if (!best || s > *best) best = s;
  }
  return best;
}

inline double substituted(const std::optional<double>& best) {
  if (!best) return 1.0;
  return *best < 1.0 ? 1.0 : *best;
}

struct Pass {
  double compile;
  double functional;
};

inline Pass pass_at_1(const std::vector<RunArchive>& archives) {
  double attempts = 0;
  double compiled = 0;
  double valid = 0;
  for (const auto& a : archives) {
    for (const auto& r : a.records) {
      attempts += 1;
      if (r.candidate.eval.has_value() && r.candidate.eval->compile_ok) compiled += 1;
      if (r.candidate.status == Status::kValid) valid += 1;
    }
  }
  return {compiled / attempts, valid / attempts};
}

inline std::size_t bucket_of(const std::optional<double>& s) {
  if (!s) return 0;
  const double v = *s;
  if (v < 1.0) return 0;
  if (v < 2.0) return 1;
  if (v < 5.0) return 2;
  if (v < 10.0) return 3;
  return 4;
}

// Top-k by fitness descending, earlier trial first on ties.
inline std::vector<std::string> top_k(std::vector<Candidate> all, std::size_t k) {
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (*a.fitness != *b.fitness) return *a.fitness > *b.fitness;
    return a.trial_index < b.trial_index;
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < all.size() && i < k; ++i) ids.push_back(all[i].id);
  return ids;
}

// Expected synthetic evaluation, written from the rules directly.
struct SyntheticExpectation {
  bool compiles;
  bool correct;
  double mean_ms;
};

inline SyntheticExpectation synthetic(const std::string& code) {
  const bool compiles = code.find("VALID") != std::string::npos;
  const bool correct = compiles && code.find("CORRECT") != std::string::npos;
  return {compiles, correct, 100.0 / (1.0 + static_cast<double>(occurrences(code, "FAST")))};
}

// Speedup a reply would earn, or nullopt when it would not be Valid.
inline std::optional<double> reply_speedup(const std::string& reply, double baseline) {
  const auto open = reply.find("```");
  if (open == std::string::npos) return std::nullopt;
  const auto body_start = reply.find('\n', open);
  if (body_start == std::string::npos) return std::nullopt;
  const auto close = reply.find("```", body_start + 1);
  if (close == std::string::npos) return std::nullopt;
  const auto body = reply.substr(body_start + 1, close - body_start - 1);
  const auto e = synthetic(body);
  if (!e.correct) return std::nullopt;
  return baseline / e.mean_ms;
}

}  // namespace kevo::oracle
