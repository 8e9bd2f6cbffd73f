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

// Reported statistics over run archives: per-task best speedup, median
// speedup with failures floored at 1.0, speedup count, Pass@1 compilation and
// functional rates, speedup-range histograms and token cost.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kevo/archive.hpp"
#include "kevo/llm_backend.hpp"

namespace kevo {

struct StatusCounts {
  std::array<std::size_t, kAllStatuses.size()> counts{};

  std::size_t& operator[](Status s) { return counts[static_cast<std::size_t>(s)]; }
  std::size_t operator[](Status s) const { return counts[static_cast<std::size_t>(s)]; }
  std::size_t total() const;
  bool operator==(const StatusCounts&) const = default;
};

struct TaskOutcome {
  std::string task_id;
  Category category = Category::kMatmul;
  std::optional<double> best_valid_speedup;
  StatusCounts trials;
  std::size_t compiled = 0;  // trials whose code compiled
  TokenUsage tokens;
  std::optional<double> cost_usd;  // absent when the model has no price

  bool operator==(const TaskOutcome&) const = default;
};

// Max over Valid trials of baseline / mean_ms, recomputed from the stored
// evaluations. Absent when no trial is Valid with timing.
std::optional<double> best_speedup_per_task(const RunArchive& archive);

TaskOutcome task_outcome(const RunArchive& archive, const PriceTable& prices);

// One outcome per archive, computed in parallel with OpenMP.
std::vector<TaskOutcome> task_outcomes(std::span<const RunArchive> archives,
                                       const PriceTable& prices);
// Serial reference for task_outcomes.
std::vector<TaskOutcome> task_outcomes_serial(std::span<const RunArchive> archives,
                                              const PriceTable& prices);

// max(best, 1.0) per task; 1.0 when no valid candidate exists.
std::vector<double> substituted_speedups(std::span<const TaskOutcome> outcomes);

// Even length: mean of the two middle values. Throws DomainError when empty.
double median_speedup(std::vector<double> values);

struct PassAtOne {
  double compile_rate = 0.0;
  double functional_rate = 0.0;
};

// Denominator is every generation attempt, unparseable replies included.
// Throws DomainError when there are no attempts.
PassAtOne pass_at_1(std::span<const RunArchive> archives);
PassAtOne pass_at_1(std::span<const TaskOutcome> outcomes);

// Tasks whose best valid speedup is strictly greater than 1.0.
std::size_t speedup_count(std::span<const TaskOutcome> outcomes);

inline const std::vector<double> kDefaultBucketEdges = {1.0, 2.0, 5.0, 10.0};

// Half-open buckets [lo, hi) split at `edges`, with an open first and last
// bucket: edges {1,2,5,10} give <1, [1,2), [2,5), [5,10), >=10. Absent
// speedups count in the first bucket.
std::vector<std::size_t> bucket_distribution(std::span<const std::optional<double>> speedups,
                                             const std::vector<double>& edges = kDefaultBucketEdges);
std::vector<std::string> bucket_labels(const std::vector<double>& edges = kDefaultBucketEdges);

struct MetricRow {
  std::string group;  // category name or "overall"
  std::size_t tasks = 0;
  double speedup_count = 0.0;
  std::vector<std::size_t> speedup_count_per_run;
  double median_speedup = 1.0;
  double compile_pass1 = 0.0;
  double functional_pass1 = 0.0;
  std::vector<double> buckets;
  std::optional<double> total_cost;
};

struct MethodReport {
  std::string method;
  std::vector<std::string> task_ids;  // sorted
  std::vector<MetricRow> rows;        // categories present (fixed order), then overall
  int runs = 1;

  const MetricRow& row(std::string_view group) const;
};

inline constexpr std::string_view kOverallGroup = "overall";

// Metrics for one run of one method over its task set.
MethodReport build_report(std::string method, std::span<const TaskOutcome> outcomes);

// Arithmetic mean of every scalar across runs; histograms averaged
// element-wise. Throws AggregationMismatch when task sets differ.
MethodReport aggregate_runs(std::span<const MethodReport> runs);

}  // namespace kevo
