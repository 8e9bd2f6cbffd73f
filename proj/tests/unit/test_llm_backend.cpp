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

#include <set>

#include "kevo/llm_backend.hpp"
#include "support/support.hpp"

using namespace kevo;
using namespace std::chrono_literals;

TEST_CASE("retry backoff doubles and caps") {
  RetryPolicy r;
  CHECK(r.backoff_for(0) == 500ms);
  CHECK(r.backoff_for(1) == 1000ms);
  CHECK(r.backoff_for(3) == 4000ms);
  CHECK(r.backoff_for(20) == 30000ms);
}

TEST_CASE("transient failures are retried and their usage kept") {
  testing::FlakyBackend backend(2, "ok");
  std::vector<std::chrono::milliseconds> slept;
  RetryPolicy retry;
  retry.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  GenerationParams params;
  const auto res = generate(backend, "prompt", params, 0, retry);
  CHECK(res.completion.text == "ok");
  CHECK(res.attempts == 3);
  CHECK(res.total_usage == TokenUsage{120, 22});
  CHECK(slept == std::vector<std::chrono::milliseconds>{500ms, 1000ms});
}

TEST_CASE("exhausted retries surface as backend unavailable") {
  testing::FlakyBackend backend(10, "ok");
  GenerationParams params;
  params.max_retries = 3;
  try {
    generate(backend, "prompt", params, 0, testing::no_sleep_retry());
    FAIL("expected BackendUnavailable");
  } catch (const BackendUnavailable& e) {
    CHECK(e.attempts() == 4);
    CHECK(e.usage() == TokenUsage{40, 4});
  }
  CHECK(backend.calls == 4);
}

TEST_CASE("non-retriable failures are not retried") {
  testing::FlakyBackend backend(1, "ok", false);
  CHECK_THROWS_AS(generate(backend, "p", GenerationParams{}, 0, testing::no_sleep_retry()),
                  BackendUnavailable);
  CHECK(backend.calls == 1);
}

TEST_CASE("blank completions are reported with their usage") {
  ScriptedBackend backend(ScriptedCorpus{{"   \n"}, false});
  try {
    generate(backend, "a b c", GenerationParams{}, 0, testing::no_sleep_retry());
    FAIL("expected EmptyCompletion");
  } catch (const EmptyCompletion& e) {
    CHECK(e.usage().input_tokens == 3);
  }
}

TEST_CASE("scripted corpus from separator file and numbered directory") {
  const auto c = ScriptedCorpus::from_text("one\n=====\ntwo\nlines\n=====\nthree");
  REQUIRE(c.replies.size() == 3);
  CHECK(c.replies[1].find("two\nlines") == 0);

  testing::TempDir dir;
  testing::write_file(dir.file("10.txt"), "ten");
  testing::write_file(dir.file("2.txt"), "two");
  testing::write_file(dir.file("notes.md"), "ignored");
  const auto d = ScriptedCorpus::load(dir.path());
  CHECK(d.replies == std::vector<std::string>{"two", "ten"});
  CHECK_THROWS_AS(ScriptedCorpus::load(dir.file("missing")), ConfigError);

  const auto shipped = ScriptedCorpus::load(testing::source_path("data/corpus/mixed60.txt"));
  CHECK(shipped.replies.size() == 60);
}

TEST_CASE("scripted replies are served by trial index") {
  const ScriptedCorpus c{{"a b", "c d e"}, false};
  const auto r = scripted_generate(c, 1, "x y z w");
  CHECK(r.text == "c d e");
  CHECK(r.usage == TokenUsage{4, 3});
  CHECK_THROWS_AS(scripted_generate(c, 2, "p"), ScriptExhausted);
  const ScriptedCorpus cyc{{"a", "b"}, true};
  CHECK(scripted_generate(cyc, 5, "p").text == "b");
}

TEST_CASE("permutation is a seeded reordering") {
  ScriptedCorpus c;
  for (int i = 0; i < 20; ++i) c.replies.push_back(std::to_string(i));
  const auto a = c.permuted(3);
  CHECK(a.replies == c.permuted(3).replies);
  CHECK(a.replies != c.permuted(4).replies);
  CHECK(std::multiset<std::string>(a.replies.begin(), a.replies.end()) ==
        std::multiset<std::string>(c.replies.begin(), c.replies.end()));
}

TEST_CASE("cost uses per-million prices") {
  const auto prices = PriceTable::standard();
  CHECK(cost(TokenUsage{2'500'000, 1'000'000}, "GPT-4.1", prices) ==
        doctest::Approx(2.5 * 2.00 + 1.0 * 8.00).epsilon(1e-12));
  CHECK(cost(TokenUsage{1'000'000, 1'000'000}, "DeepSeekV3.1", prices) ==
        doctest::Approx(0.56 + 1.68).epsilon(1e-12));
  CHECK(cost(TokenUsage{1'000'000, 0}, "claude-sonnet-4-20250514", prices) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(cost(TokenUsage{1, 1}, "unknown-model", prices), MissingPrice);
  PriceTable t;
  CHECK_THROWS_AS(t.set("m", ModelPrice{-1.0, 0.0}), ConfigError);
}

TEST_CASE("generation params validate") {
  GenerationParams p;
  CHECK_NOTHROW(p.validate());
  p.temperature = -0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = GenerationParams{};
  p.max_retries = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
