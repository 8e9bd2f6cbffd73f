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

#include <doctest.h>

#include "kevo/traverse.hpp"
#include "support/support.hpp"

using namespace kevo;

namespace {

bool contains(const std::string& s, std::string_view needle) {
  return s.find(needle) != std::string::npos;
}

Candidate valid(std::size_t trial, double fitness, std::string code) {
  Candidate c;
  c.id = "c" + std::to_string(trial);
  c.trial_index = trial;
  c.status = Status::kValid;
  c.fitness = fitness;
  c.code = std::move(code);
  return c;
}

}  // namespace

TEST_CASE("presets follow the information matrix") {
  struct Row {
    StrategyName name;
    bool history;
    bool insights;
    PopulationStrategy pop;
  };
  for (auto row : {Row{StrategyName::kFree, false, false, PopulationStrategy::kSingleBest},
                   Row{StrategyName::kInsight, false, true, PopulationStrategy::kSingleBest},
                   Row{StrategyName::kSolution, true, false, PopulationStrategy::kElite},
                   Row{StrategyName::kFull, true, true, PopulationStrategy::kElite}}) {
    const auto cfg = StrategyConfig::preset(row.name);
    CHECK(cfg.use_task_context);
    CHECK(cfg.use_history == row.history);
    CHECK(cfg.use_insights == row.insights);
    CHECK(cfg.population.strategy == row.pop);
    CHECK_NOTHROW(cfg.validate());
  }
  auto bad = StrategyConfig::preset(StrategyName::kFree);
  bad.use_history = true;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  auto islands = StrategyConfig::preset(StrategyName::kFull);
  islands.population.strategy = PopulationStrategy::kIslands;
  CHECK_NOTHROW(islands.validate());
}

TEST_CASE("context uses the incumbent and feedback") {
  const auto task = testing::make_task();
  Population pop(PopulationConfig{PopulationStrategy::kElite, 4, 5});
  InsightStore store(10);
  const auto cfg = StrategyConfig::preset(StrategyName::kFull);

  auto ctx = build_context(cfg, ContextInputs{task, pop, store, std::nullopt, 0});
  CHECK(contains(ctx.task_section, "Initial implementation"));
  CHECK(contains(ctx.task_section, task.initial_code));
  REQUIRE(ctx.history_section);
  CHECK(ctx.history_section->empty());

  pop.insert(valid(1, 1.5, "SLOW"));
  pop.insert(valid(2, 2.5, "QUICK"));
  store.add(Insight{"use shared memory", "c2", 2.5});
  ctx = build_context(cfg, ContextInputs{task, pop, store, std::string("compile error x"), 3});
  CHECK(contains(ctx.task_section, "Current best solution"));
  CHECK(contains(ctx.task_section, "QUICK"));
  CHECK(contains(ctx.task_section, "compile error x"));
  REQUIRE(ctx.history_section->size() == 2);
  CHECK((*ctx.history_section)[0].candidate_id == "c2");
  REQUIRE(ctx.insight_section);
  CHECK(ctx.insight_section->front() == "use shared memory");

  const auto free_ctx = build_context(StrategyConfig::preset(StrategyName::kFree),
                                      ContextInputs{task, pop, store, std::nullopt, 3});
  CHECK_FALSE(free_ctx.history_section);
  CHECK_FALSE(free_ctx.insight_section);
}

TEST_CASE("history is capped at history_n") {
  const auto task = testing::make_task();
  Population pop(PopulationConfig{PopulationStrategy::kElite, 8, 5});
  for (std::size_t i = 0; i < 8; ++i) pop.insert(valid(i, 1.0 + i, "v"));
  InsightStore store(10);
  auto cfg = StrategyConfig::preset(StrategyName::kSolution);
  const auto ctx = build_context(cfg, ContextInputs{task, pop, store, std::nullopt, 9});
  CHECK(ctx.history_section->size() == cfg.history_n);
}

TEST_CASE("rendered sections appear only when selected") {
  const auto task = testing::make_task();
  Population pop(PopulationConfig{PopulationStrategy::kElite, 4, 5});
  InsightStore store(10);
  for (auto name : kAllStrategies) {
    const auto cfg = StrategyConfig::preset(name);
    const auto ctx = build_context(cfg, ContextInputs{task, pop, store, std::nullopt, 0});
    const auto prompt = render_prompt(ctx, PromptTemplate::canonical());
    CHECK(contains(prompt, kTaskHeader));
    CHECK(contains(prompt, kOutputHeader));
    CHECK(contains(prompt, kHistoryHeader) == cfg.use_history);
    CHECK(contains(prompt, kInsightHeader) == cfg.use_insights);
    CHECK(contains(prompt, kInsightMarker) == cfg.use_insights);
    CHECK_FALSE(contains(prompt, "{{"));
  }
}

TEST_CASE("template placeholders are checked") {
  CHECK_NOTHROW(PromptTemplate::parse("{{task}}\n{{output_format}}"));
  CHECK_THROWS_AS(PromptTemplate::parse("{{task}}{{task}}"), TemplateError);
  CHECK_THROWS_AS(PromptTemplate::parse("{{insights}}{{history}}"), TemplateError);
  CHECK_THROWS_AS(PromptTemplate::parse("{{whatever}}"), TemplateError);
  CHECK_THROWS_AS(PromptTemplate::load("/nonexistent/template.txt"), Error);
}

TEST_CASE("response parsing takes the first fence and outside insights") {
  const auto p = parse_response(
      "Sure.\n```cuda\nVALID CORRECT\nFAST\n```\n```\nsecond\n```\nINSIGHT: tile the loop\n"
      "across warps\n\nclosing words");
  CHECK(p.code == "VALID CORRECT\nFAST");
  REQUIRE(p.insight);
  CHECK(p.insight->find("tile the loop") == 0);

  const auto inside = parse_response("```\nINSIGHT: not this\ncode\n```\n");
  CHECK_FALSE(inside.insight);

  CHECK_THROWS_AS(parse_response("no code here"), ParseError);
  CHECK_THROWS_AS(parse_response("```cuda\n```"), ParseError);
}

TEST_CASE("insight store is a bounded FIFO") {
  InsightStore s(3);
  for (int i = 0; i < 5; ++i) s.add(Insight{std::to_string(i), "", std::nullopt});
  CHECK(s.size() == 3);
  const auto r = s.recent(2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].text == "3");
  CHECK(r[1].text == "4");
  CHECK(s.items().front().text == "2");
}
