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

#include "kevo/metrics.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <map>

namespace kevo {

std::size_t StatusCounts::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::optional<double> best_speedup_per_task(const RunArchive& archive) {
  std::optional<double> best;
  const double baseline = archive.header.task.baseline_mean_ms;
  for (const auto& r : archive.records) {
    const auto& c = r.candidate;
    if (c.status != Status::kValid || !c.eval || !c.eval->timing) continue;
    const double s = speedup(baseline, c.eval->timing->mean_ms);
    if (!best || s > *best) best = s;
  }
  return best;
}

TaskOutcome task_outcome(const RunArchive& archive, const PriceTable& prices) {
  TaskOutcome o;
  o.task_id = archive.header.task.id;
  o.category = archive.header.task.category;
  o.best_valid_speedup = best_speedup_per_task(archive);
  for (const auto& r : archive.records) {
    ++o.trials[r.candidate.status];
    if (r.candidate.eval && r.candidate.eval->compile_ok) ++o.compiled;
  }
  o.tokens = archive.total_tokens();
  if (prices.contains(archive.header.model_name)) {
    o.cost_usd = cost(o.tokens, archive.header.model_name, prices);
  }
  return o;
}

std::vector<TaskOutcome> task_outcomes(std::span<const RunArchive> archives,
                                       const PriceTable& prices) {
  std::vector<TaskOutcome> out(archives.size());
  const auto n = static_cast<std::ptrdiff_t>(archives.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = task_outcome(archives[i], prices);
  }
  return out;
}

std::vector<TaskOutcome> task_outcomes_serial(std::span<const RunArchive> archives,
                                              const PriceTable& prices) {
  std::vector<TaskOutcome> out;
  out.reserve(archives.size());
  for (const auto& a : archives) out.push_back(task_outcome(a, prices));
  return out;
}

std::vector<double> substituted_speedups(std::span<const TaskOutcome> outcomes) {
  std::vector<double> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    out.push_back(o.best_valid_speedup ? std::max(*o.best_valid_speedup, 1.0) : 1.0);
  }
  return out;
}

double median_speedup(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

PassAtOne pass_at_1(std::span<const RunArchive> archives) {
  std::size_t attempts = 0;
  std::size_t compiled = 0;
  std::size_t correct = 0;
  for (const auto& a : archives) {
    for (const auto& r : a.records) {
      ++attempts;
      if (r.candidate.eval && r.candidate.eval->compile_ok) ++compiled;
      if (r.candidate.status == Status::kValid) ++correct;
    }
  }
  if (attempts == 0) throw DomainError("pass@1 needs at least one attempt");
  return {static_cast<double>(compiled) / static_cast<double>(attempts),
          static_cast<double>(correct) / static_cast<double>(attempts)};
}

PassAtOne pass_at_1(std::span<const TaskOutcome> outcomes) {
  std::size_t attempts = 0;
  std::size_t compiled = 0;
  std::size_t correct = 0;
  for (const auto& o : outcomes) {
    attempts += o.trials.total();
    compiled += o.compiled;
    correct += o.trials[Status::kValid];
  }
  if (attempts == 0) throw DomainError("pass@1 needs at least one attempt");
  return {static_cast<double>(compiled) / static_cast<double>(attempts),
          static_cast<double>(correct) / static_cast<double>(attempts)};
}

std::size_t speedup_count(std::span<const TaskOutcome> outcomes) {
  return static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(),
      [](const TaskOutcome& o) { return o.best_valid_speedup && *o.best_valid_speedup > 1.0; }));
}

std::vector<std::size_t> bucket_distribution(std::span<const std::optional<double>> speedups,
                                             const std::vector<double>& edges) {
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw ContractViolation("bucket edges must be ascending");
  }
  std::vector<std::size_t> hist(edges.size() + 1, 0);
  for (const auto& s : speedups) {
    const double v = s.value_or(0.0);
    const auto idx = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
    ++hist[static_cast<std::size_t>(idx)];
  }
  return hist;
}

std::vector<std::string> bucket_labels(const std::vector<double>& edges) {
  std::vector<std::string> out;
  if (edges.empty()) return {"all"};
  out.push_back(fmt::format("<{:g}", edges.front()));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(fmt::format("{:g}-{:g}", edges[i], edges[i + 1]));
  }
  out.push_back(fmt::format(">={:g}", edges.back()));
  return out;
}

const MetricRow& MethodReport::row(std::string_view group) const {
  for (const auto& r : rows) {
    if (r.group == group) return r;
  }
  throw ContractViolation(fmt::format("report has no row '{}'", group));
}

namespace {

MetricRow row_for(std::string group, std::span<const TaskOutcome> outcomes) {
  MetricRow row;
  row.group = std::move(group);
  row.tasks = outcomes.size();
  const auto count = speedup_count(outcomes);
  row.speedup_count = static_cast<double>(count);
  row.speedup_count_per_run = {count};
  row.median_speedup = median_speedup(substituted_speedups(outcomes));
  const auto pass = pass_at_1(outcomes);
  row.compile_pass1 = pass.compile_rate;
  row.functional_pass1 = pass.functional_rate;
  std::vector<std::optional<double>> raw;
  for (const auto& o : outcomes) raw.push_back(o.best_valid_speedup);
  for (auto c : bucket_distribution(raw)) row.buckets.push_back(static_cast<double>(c));
  double total = 0.0;
  bool priced = true;
  for (const auto& o : outcomes) {
    if (!o.cost_usd) priced = false;
    total += o.cost_usd.value_or(0.0);
  }
  if (priced) row.total_cost = total;
  return row;
}

}  // namespace

MethodReport build_report(std::string method, std::span<const TaskOutcome> outcomes) {
  if (outcomes.empty()) throw DomainError("report needs at least one task outcome");
  MethodReport rep;
  rep.method = std::move(method);
  for (const auto& o : outcomes) rep.task_ids.push_back(o.task_id);
  std::sort(rep.task_ids.begin(), rep.task_ids.end());
  for (auto cat : kAllCategories) {
    std::vector<TaskOutcome> subset;
    for (const auto& o : outcomes) {
      if (o.category == cat) subset.push_back(o);
    }
    if (!subset.empty()) rep.rows.push_back(row_for(std::string(to_string(cat)), subset));
  }
  rep.rows.push_back(row_for(std::string(kOverallGroup), outcomes));
  return rep;
}

MethodReport aggregate_runs(std::span<const MethodReport> runs) {
  if (runs.empty()) throw DomainError("aggregate_runs needs at least one run");
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.task_ids != first.task_ids) {
      throw AggregationMismatch(fmt::format("runs of '{}' cover different task sets",
                                            first.method));
    }
    if (r.rows.size() != first.rows.size()) {
      throw AggregationMismatch("runs disagree on report rows");
    }
  }
  MethodReport out;
  out.method = first.method;
  out.task_ids = first.task_ids;
  out.runs = 0;
  for (const auto& r : runs) out.runs += r.runs;
  const double n = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    MetricRow row;
    row.group = first.rows[i].group;
    row.tasks = first.rows[i].tasks;
    row.speedup_count = 0.0;
    row.median_speedup = 0.0;
    row.buckets.assign(first.rows[i].buckets.size(), 0.0);
    double cost_sum = 0.0;
    bool priced = true;
    for (const auto& r : runs) {
      const auto& src = r.rows[i];
      if (src.group != row.group) throw AggregationMismatch("runs disagree on report rows");
      row.speedup_count += src.speedup_count / n;
      row.speedup_count_per_run.insert(row.speedup_count_per_run.end(),
                                       src.speedup_count_per_run.begin(),
                                       src.speedup_count_per_run.end());
      row.median_speedup += src.median_speedup / n;
      row.compile_pass1 += src.compile_pass1 / n;
      row.functional_pass1 += src.functional_pass1 / n;
      for (std::size_t b = 0; b < row.buckets.size(); ++b) row.buckets[b] += src.buckets[b] / n;
      if (!src.total_cost) priced = false;
      cost_sum += src.total_cost.value_or(0.0);
    }
    if (priced) row.total_cost = cost_sum / n;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace kevo
