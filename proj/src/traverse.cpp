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

#include "kevo/traverse.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "kevo/canonical_template.hpp"

namespace kevo {

namespace {

constexpr std::array<std::string_view, 4> kPlaceholders = {
    "task", "history", "insights", "output_format"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void append_code_block(std::string& out, std::string_view code) {
  out += "```\n";
  out += code;
  if (!code.empty() && code.back() != '\n') out += '\n';
  out += "```\n";
}

std::string render_task(const PromptContext& ctx) { return ctx.task_section; }

std::string render_history(const std::vector<HistoryEntry>& history) {
  std::string out = fmt::format("{}\n", kHistoryHeader);
  if (history.empty()) {
    out += "(none yet)\n";
    return out;
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += fmt::format("Solution {} (speedup {:.4f}x):\n", i + 1, history[i].fitness);
    append_code_block(out, history[i].code);
  }
  return out;
}

std::string render_insights(const std::vector<std::string>& insights) {
  std::string out = fmt::format("{}\n", kInsightHeader);
  if (insights.empty()) {
    out += "(none yet)\n";
    return out;
  }
  for (const auto& text : insights) out += fmt::format("- {}\n", text);
  return out;
}

std::string render_output_format(bool want_insight) {
  std::string out = fmt::format("{}\n", kOutputHeader);
  out += "Return the complete optimized source in a single fenced code block (```).\n";
  if (want_insight) {
    out += fmt::format(
        "After the code block, add a line starting with \"{}\" that states the key "
        "optimization idea behind this version.\n",
        kInsightMarker);
  }
  return out;
}

// Collapses runs of blank lines left behind by absent sections.
std::string squeeze_blank_lines(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  int newlines = 0;
  for (char c : text) {
    if (c == '\n') {
      if (++newlines > 2) continue;
    } else {
      newlines = 0;
    }
    out.push_back(c);
  }
  return out;
}

struct Fence {
  std::size_t begin;       // first backtick of the opening fence
  std::size_t code_begin;  // first byte after the opening fence line
  std::size_t code_end;    // first backtick of the closing fence
  std::size_t end;         // one past the closing fence line
};

std::vector<Fence> find_fences(std::string_view text) {
  std::vector<Fence> fences;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto nl = text.find('\n', open);
    if (nl == std::string_view::npos) break;
    const auto close = text.find("```", nl + 1);
    if (close == std::string_view::npos) break;
    const auto close_nl = text.find('\n', close);
    const std::size_t end = close_nl == std::string_view::npos ? text.size() : close_nl + 1;
    fences.push_back({open, nl + 1, close, end});
    pos = end;
  }
  return fences;
}

}  // namespace

std::string_view to_string(StrategyName s) {
  switch (s) {
    case StrategyName::kFree: return "Free";
    case StrategyName::kInsight: return "Insight";
    case StrategyName::kSolution: return "Solution";
    case StrategyName::kFull: return "Full";
  }
  return "?";
}

StrategyName parse_strategy_name(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError(fmt::format("unknown strategy '{}'", name));
}

StrategyConfig StrategyConfig::preset(StrategyName name) {
  StrategyConfig c;
  c.name = name;
  c.use_task_context = true;
  const bool elite = name == StrategyName::kSolution || name == StrategyName::kFull;
  c.use_history = elite;
  c.use_insights = name == StrategyName::kInsight || name == StrategyName::kFull;
  c.history_n = elite ? 4 : 0;
  c.insights_n = c.use_insights ? 3 : 0;
  c.population.strategy = elite ? PopulationStrategy::kElite : PopulationStrategy::kSingleBest;
  c.population.capacity = elite ? 4 : 1;
  return c;
}

void StrategyConfig::validate() const {
  const auto expect = preset(name);
  if (!use_task_context) throw ConfigError("task context (I1) is always enabled");
  if (use_history != expect.use_history || use_insights != expect.use_insights) {
    throw ConfigError(fmt::format(
        "strategy {} requires history={} insights={}", to_string(name),
        expect.use_history, expect.use_insights));
  }
  if (population.strategy != PopulationStrategy::kIslands &&
      population.strategy != expect.population.strategy) {
    throw ConfigError(fmt::format("strategy {} uses a {} population", to_string(name),
                                  to_string(expect.population.strategy)));
  }
  population.validate();
}

InsightStore::InsightStore(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw ConfigError("insight store capacity must be >= 1");
}

void InsightStore::add(Insight insight) {
  items_.push_back(std::move(insight));
  while (items_.size() > capacity_) items_.pop_front();
}

std::vector<Insight> InsightStore::recent(std::size_t n) const {
  const std::size_t take = std::min(n, items_.size());
  return {items_.end() - static_cast<std::ptrdiff_t>(take), items_.end()};
}

PromptContext build_context(const StrategyConfig& cfg, const ContextInputs& in) {
  PromptContext ctx;
  const Task& task = in.task;

  std::string& t = ctx.task_section;
  t = fmt::format("{}\nTask id: {} (category: {})\n", kTaskHeader, task.id,
                  to_string(task.category));
  if (!task.description.empty()) t += fmt::format("{}\n", task.description);
  t += fmt::format("Baseline runtime: {:.4f} ms. Outputs must match the reference "
                   "within abs {} / rel {} on {} test cases.\n",
                   task.baseline_mean_ms, task.test_spec.abs_tolerance,
                   task.test_spec.rel_tolerance, task.test_spec.n_cases);
  if (!task.reference_source.empty()) {
    t += "\nReference implementation:\n";
    append_code_block(t, task.reference_source);
  }
  if (auto best = in.population.incumbent_for(in.trial_index)) {
    t += fmt::format("\nCurrent best solution (speedup {:.4f}x):\n", *best->fitness);
    append_code_block(t, best->code);
    ctx.source_ids.push_back(best->id);
  } else {
    t += "\nInitial implementation:\n";
    append_code_block(t, task.initial_code);
  }
  if (in.last_feedback && !in.last_feedback->empty()) {
    t += fmt::format("\nFeedback from the previous attempt:\n{}\n", *in.last_feedback);
  }

  if (cfg.use_history) {
    auto& hist = ctx.history_section.emplace();
    for (const auto& c : in.population.context_solutions(cfg.history_n, in.trial_index)) {
      hist.push_back({c.id, c.code, *c.fitness});
      if (std::find(ctx.source_ids.begin(), ctx.source_ids.end(), c.id) ==
          ctx.source_ids.end()) {
        ctx.source_ids.push_back(c.id);
      }
    }
  }
  if (cfg.use_insights) {
    auto& ins = ctx.insight_section.emplace();
    for (const auto& i : in.insights.recent(cfg.insights_n)) ins.push_back(i.text);
  }
  return ctx;
}

PromptTemplate PromptTemplate::parse(std::string text) {
  int last = -1;
  std::array<bool, kPlaceholders.size()> seen{};
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    const auto close = text.find("}}", pos + 2);
    if (close == std::string::npos) {
      throw TemplateError(fmt::format("unterminated placeholder at offset {}", pos));
    }
    const std::string_view name(text.data() + pos + 2, close - pos - 2);
    int idx = -1;
    for (std::size_t i = 0; i < kPlaceholders.size(); ++i) {
      if (kPlaceholders[i] == name) idx = static_cast<int>(i);
    }
    if (idx < 0) throw TemplateError(fmt::format("unknown placeholder '{{{{{}}}}}'", name));
    if (seen[idx]) throw TemplateError(fmt::format("placeholder '{}' repeated", name));
    if (idx < last) {
      throw TemplateError(fmt::format("placeholder '{}' out of order", name));
    }
    seen[idx] = true;
    last = idx;
    pos = close + 2;
  }
  return PromptTemplate(std::move(text));
}

PromptTemplate PromptTemplate::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError(fmt::format("cannot open template '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const PromptTemplate& PromptTemplate::canonical() {
  static const PromptTemplate tmpl = parse(detail::kCanonicalTemplate);
  return tmpl;
}

std::string render_prompt(const PromptContext& ctx, const PromptTemplate& tmpl) {
  const std::string& src = tmpl.text();
  std::string out;
  out.reserve(src.size() + ctx.task_section.size() + 1024);
  std::size_t pos = 0;
  while (true) {
    const auto open = src.find("{{", pos);
    if (open == std::string::npos) {
      out.append(src, pos, std::string::npos);
      break;
    }
    out.append(src, pos, open - pos);
    const auto close = src.find("}}", open + 2);
    const std::string_view name(src.data() + open + 2, close - open - 2);
    if (name == "task") {
      out += render_task(ctx);
    } else if (name == "history") {
      if (ctx.history_section) out += render_history(*ctx.history_section);
    } else if (name == "insights") {
      if (ctx.insight_section) out += render_insights(*ctx.insight_section);
    } else if (name == "output_format") {
      out += render_output_format(ctx.insight_section.has_value());
    }
    pos = close + 2;
  }
  return squeeze_blank_lines(out);
}

ParsedOutput parse_response(std::string_view text) {
  const auto fences = find_fences(text);
  if (fences.empty()) throw ParseError("reply contains no fenced code block");

  ParsedOutput out;
  const auto& first = fences.front();
  std::string_view code = text.substr(first.code_begin, first.code_end - first.code_begin);
  if (code.ends_with('\n')) code.remove_suffix(1);
  if (code.ends_with('\r')) code.remove_suffix(1);
  if (trim(code).empty()) throw ParseError("first fenced code block is empty");
  out.code = std::string(code);

  // Walk the text outside fences line by line collecting insight paragraphs.
  std::vector<std::string> parts;
  bool collecting = false;
  std::size_t pos = 0;
  std::size_t next_fence = 0;
  while (pos < text.size()) {
    if (next_fence < fences.size() && pos >= fences[next_fence].begin) {
      pos = std::max(pos, fences[next_fence].end);
      ++next_fence;
      collecting = false;
      continue;
    }
    auto nl = text.find('\n', pos);
    std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    if (next_fence < fences.size()) line_end = std::min(line_end, fences[next_fence].begin);
    const std::string_view line = trim(text.substr(pos, line_end - pos));
    if (line.starts_with(kInsightMarker)) {
      parts.emplace_back(trim(line.substr(kInsightMarker.size())));
      collecting = true;
    } else if (line.empty()) {
      collecting = false;
    } else if (collecting) {
      auto& cur = parts.back();
      if (!cur.empty()) cur += '\n';
      cur += line;
    }
    pos = line_end == nl ? nl + 1 : line_end;
  }
  std::string joined;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!joined.empty()) joined += '\n';
    joined += p;
  }
  if (!joined.empty()) out.insight = std::move(joined);
  return out;
}

}  // namespace kevo
