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

// Two-layer traverse technique. The solution-guiding layer (StrategyConfig,
// build_context) decides which closed-world information reaches the model:
//   I1 task context, I2 historical solutions, I3 optimization insights.
// The prompt-engineering layer (PromptTemplate, render_prompt) turns that
// selection into text, and parse_response reads the model's answer back.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kevo/core.hpp"
#include "kevo/insight_store.hpp"
#include "kevo/population.hpp"

namespace kevo {

enum class StrategyName { kFree, kInsight, kSolution, kFull };

inline constexpr StrategyName kAllStrategies[] = {
    StrategyName::kFree, StrategyName::kInsight, StrategyName::kSolution,
    StrategyName::kFull};

std::string_view to_string(StrategyName s);
StrategyName parse_strategy_name(std::string_view name);

struct StrategyConfig {
  StrategyName name = StrategyName::kFull;
  bool use_task_context = true;
  bool use_history = true;
  bool use_insights = true;
  std::size_t history_n = 4;
  std::size_t insights_n = 3;
  PopulationConfig population;

  // Information flags and population strategy for a named configuration:
  //   Free     I1          SingleBest
  //   Insight  I1 + I3     SingleBest
  //   Solution I1 + I2     Elite(4)
  //   Full     I1 + I2 + I3 Elite(4)
  static StrategyConfig preset(StrategyName name);

  // Throws ConfigError when the information flags disagree with the preset
  // for `name`. The population may be swapped for Islands.
  void validate() const;

  bool operator==(const StrategyConfig&) const = default;
};

struct HistoryEntry {
  std::string candidate_id;
  std::string code;
  double fitness = 0.0;

  bool operator==(const HistoryEntry&) const = default;
};

struct PromptContext {
  std::string task_section;
  std::optional<std::vector<HistoryEntry>> history_section;
  std::optional<std::vector<std::string>> insight_section;
  // Ids of the candidates whose code appears in the context.
  std::vector<std::string> source_ids;

  bool operator==(const PromptContext&) const = default;
};

struct ContextInputs {
  const Task& task;
  const Population& population;
  const InsightStore& insights;
  std::optional<std::string> last_feedback;
  std::size_t trial_index = 0;
};

PromptContext build_context(const StrategyConfig& cfg, const ContextInputs& in);

// Plain text with {{task}}, {{history}}, {{insights}} and {{output_format}}
// placeholders. Each may appear at most once and in that relative order.
class PromptTemplate {
 public:
  // Throws TemplateError on an unknown, repeated or out-of-order placeholder.
  static PromptTemplate parse(std::string text);
  static PromptTemplate load(const std::string& path);
  // The versioned template shipped in templates/.
  static const PromptTemplate& canonical();

  const std::string& text() const { return text_; }

 private:
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

inline constexpr std::string_view kTaskHeader = "## Task";
inline constexpr std::string_view kHistoryHeader = "## Historical Solutions";
inline constexpr std::string_view kInsightHeader = "## Optimization Insights";
inline constexpr std::string_view kOutputHeader = "## Output Format";
inline constexpr std::string_view kInsightMarker = "INSIGHT:";

std::string render_prompt(const PromptContext& ctx, const PromptTemplate& tmpl);

struct ParsedOutput {
  std::string code;
  std::optional<std::string> insight;

  bool operator==(const ParsedOutput&) const = default;
};

// Code is the body of the first fenced block; insight is every line after an
// "INSIGHT:" marker that sits outside code fences. Throws ParseError when the
// reply holds no fenced block or the block is empty.
ParsedOutput parse_response(std::string_view text);

}  // namespace kevo
