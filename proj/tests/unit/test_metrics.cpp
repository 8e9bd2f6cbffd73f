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

#include <random>

#include "kevo/metrics.hpp"
#include "oracles/oracles.hpp"
#include "support/random_archives.hpp"
#include "support/support.hpp"

using namespace kevo;

namespace {

TaskOutcome outcome(std::string id, Category cat, std::optional<double> best,
                    std::size_t attempts = 1, std::size_t valid = 0, std::size_t compiled = 0) {
  TaskOutcome o;
  o.task_id = std::move(id);
  o.category = cat;
  o.best_valid_speedup = best;
  o.trials[Status::kValid] = valid;
  o.trials[Status::kCompileError] = attempts - valid;
  o.compiled = compiled;
  o.cost_usd = 0.0;
  return o;
}

}  // namespace

TEST_CASE("median floors failures at one") {
  const std::vector<TaskOutcome> os = {outcome("a", Category::kLoss, 3.0),
                                       outcome("b", Category::kLoss, 0.4),
                                       outcome("c", Category::kLoss, std::nullopt),
                                       outcome("d", Category::kLoss, 1.8)};
  const auto subs = substituted_speedups(os);
  CHECK(subs == std::vector<double>{3.0, 1.0, 1.0, 1.8});
  CHECK(median_speedup(subs) == doctest::Approx(1.4));
  CHECK(median_speedup({5.0}) == 5.0);
  CHECK(median_speedup({1.0, 9.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(median_speedup({}), DomainError);
}

TEST_CASE("speedup count is strict") {
  const std::vector<TaskOutcome> os = {outcome("a", Category::kLoss, 1.0),
                                       outcome("b", Category::kLoss, 1.0000001),
                                       outcome("c", Category::kLoss, std::nullopt)};
  CHECK(speedup_count(os) == 1);
}

TEST_CASE("buckets are half-open and absent counts low") {
  const std::vector<std::optional<double>> s = {std::nullopt, 0.5, 1.0, 1.99, 2.0,
                                                4.9,          5.0, 10.0, 250.0};
  CHECK(bucket_distribution(s) == std::vector<std::size_t>{2, 2, 2, 1, 2});
  CHECK(bucket_labels() == std::vector<std::string>{"<1", "1-2", "2-5", "5-10", ">=10"});
}

TEST_CASE("hand-walked bucket example") {
  // 0.8 -> <1, 1.5 -> [1,2), 2.0 -> [2,5), 36.75 -> >=10
  const std::vector<std::optional<double>> s = {0.8, 1.5, 2.0, 36.75};
  CHECK(bucket_distribution(s) == std::vector<std::size_t>{1, 1, 1, 0, 1});
  std::vector<std::size_t> walked(5, 0);
  for (const auto& v : s) ++walked[oracle::bucket_of(v)];
  CHECK(bucket_distribution(s) == walked);
}

TEST_CASE("median of 91 seeded values matches a sort oracle") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> dist(0.1, 40.0);
  std::vector<double> v(91);
  for (auto& x : v) x = dist(rng);
  CHECK(median_speedup(v) == oracle::median(v));
}

TEST_CASE("pass@1 divides by every attempt") {
  std::vector<TaskOutcome> os = {outcome("a", Category::kLoss, 2.0, 10, 3, 6),
                                 outcome("b", Category::kLoss, std::nullopt, 10, 0, 1)};
  const auto p = pass_at_1(os);
  CHECK(p.compile_rate == doctest::Approx(7.0 / 20.0));
  CHECK(p.functional_rate == doctest::Approx(3.0 / 20.0));
  std::vector<TaskOutcome> none = {outcome("z", Category::kLoss, std::nullopt, 0)};
  none[0].trials = {};
  CHECK_THROWS_AS(pass_at_1(none), DomainError);
}

TEST_CASE("metrics agree with brute-force oracles on random archives") {
  std::mt19937_64 rng(123);
  const auto prices = PriceTable::standard();
  for (int round = 0; round < 300; ++round) {
    std::vector<RunArchive> archives;
    const int n = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) {
      archives.push_back(testing::random_archive(rng, "r", "t" + std::to_string(i)));
    }
    const auto outs = task_outcomes(archives, prices);
    REQUIRE(outs == task_outcomes_serial(archives, prices));

    std::vector<double> subs;
    std::vector<std::optional<double>> raw;
    std::size_t count = 0;
    std::vector<std::size_t> hist(5, 0);
    for (const auto& a : archives) {
      const auto best = oracle::best_speedup(a);
      raw.push_back(best);
      subs.push_back(oracle::substituted(best));
      if (best && *best > 1.0) ++count;
      ++hist[oracle::bucket_of(best)];
    }
    REQUIRE(median_speedup(substituted_speedups(outs)) == oracle::median(subs));
    REQUIRE(speedup_count(outs) == count);
    REQUIRE(bucket_distribution(raw) == hist);
    const auto p = pass_at_1(archives);
    const auto want = oracle::pass_at_1(archives);
    REQUIRE(p.compile_rate == want.compile);
    REQUIRE(p.functional_rate == want.functional);
    const auto p2 = pass_at_1(outs);
    REQUIRE(p2.compile_rate == want.compile);
    REQUIRE(p2.functional_rate == want.functional);
  }
}

TEST_CASE("reports group by category and average across runs") {
  const std::vector<TaskOutcome> run1 = {outcome("a", Category::kLoss, 3.0, 4, 2, 3),
                                         outcome("b", Category::kMatmul, std::nullopt, 4, 0, 1)};
  const std::vector<TaskOutcome> run2 = {outcome("a", Category::kLoss, 0.5, 4, 1, 1),
                                         outcome("b", Category::kMatmul, 2.0, 4, 1, 4)};
  const auto r1 = build_report("m", run1);
  const auto r2 = build_report("m", run2);
  REQUIRE(r1.rows.size() == 3);
  CHECK(r1.rows[0].group == "matmul");
  CHECK(r1.rows[1].group == "loss");
  CHECK(r1.rows[2].group == "overall");
  const std::vector<MethodReport> both = {r1, r2};
  const auto agg = aggregate_runs(both);
  CHECK(agg.runs == 2);
  const auto& overall = agg.row("overall");
  CHECK(overall.speedup_count == doctest::Approx(1.0));
  CHECK(overall.speedup_count_per_run == std::vector<std::size_t>{1, 1});
  CHECK(overall.median_speedup == doctest::Approx((2.0 + 1.5) / 2.0));
  CHECK(overall.compile_pass1 == doctest::Approx((4.0 / 8.0 + 5.0 / 8.0) / 2.0));
  CHECK(overall.buckets == std::vector<double>{1.0, 0.0, 1.0, 0.0, 0.0});

  const std::vector<TaskOutcome> other = {outcome("a", Category::kLoss, 3.0)};
  const std::vector<MethodReport> mismatched = {r1, build_report("m", other)};
  CHECK_THROWS_AS(aggregate_runs(mismatched), AggregationMismatch);
}

TEST_CASE("outcomes price tokens by model") {
  std::mt19937_64 rng(1);
  auto a = testing::random_archive(rng, "r", "t");
  a.header.model_name = "GPT-4.1";
  const auto o = task_outcome(a, PriceTable::standard());
  const auto tokens = a.total_tokens();
  REQUIRE(o.cost_usd);
  CHECK(*o.cost_usd == doctest::Approx(static_cast<double>(tokens.input_tokens) * 2.0 / 1e6 +
                                       static_cast<double>(tokens.output_tokens) * 8.0 / 1e6));
  a.header.model_name = "mystery";
  CHECK_FALSE(task_outcome(a, PriceTable::standard()).cost_usd);
}
