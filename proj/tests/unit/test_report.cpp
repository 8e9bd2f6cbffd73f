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

#include "kevo/report.hpp"
#include "support/random_archives.hpp"
#include "support/support.hpp"

using namespace kevo;

TEST_CASE("scan skips corrupt and unfinished archives") {
  testing::TempDir dir;
  std::mt19937_64 rng(7);
  auto good = testing::random_archive(rng, "Full_m_seed0", "t0");
  write_archive(dir.file("Full_m_seed0/t0.jsonl"), good);
  testing::write_file(dir.file("Full_m_seed0/bad.jsonl"), "{not json}\n");
  auto open = good;
  open.footer.reset();
  write_archive(dir.file("Full_m_seed0/open.jsonl"), open);
  testing::write_file(dir.file("notes.txt"), "ignored");

  const auto scan = scan_archives(dir.path());
  CHECK(scan.archives.size() == 1);
  CHECK(scan.warnings.size() == 2);
  CHECK(scan_archives(dir.file("missing")).archives.empty());
}

TEST_CASE("csv and markdown reports are written") {
  testing::TempDir dir;
  std::mt19937_64 rng(8);
  std::vector<RunArchive> archives;
  for (int seed = 0; seed < 3; ++seed) {
    for (int t = 0; t < 4; ++t) {
      auto a = testing::random_archive(rng, "Full_GPT-4.1_seed" + std::to_string(seed),
                                       "task" + std::to_string(t));
      a.header.model_name = "GPT-4.1";
      a.header.task.category = kAllCategories[t % 2];
      archives.push_back(a);
    }
  }
  const auto set = build_reports(archives, PriceTable::standard());
  REQUIRE(set.methods.size() == 1);
  CHECK(set.methods[0].runs == 3);
  CHECK(set.methods[0].rows.size() == 3);
  CHECK(set.tokens.size() == 12);

  write_csv_reports(set, dir.path());
  write_markdown_report(set, dir.path());
  const auto summary = testing::read_file(dir.file("summary.csv"));
  CHECK(summary.rfind("method,group,tasks,runs,speedup_count_mean,speedup_count_per_run", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
  const auto buckets = testing::read_file(dir.file("buckets.csv"));
  CHECK(std::count(buckets.begin(), buckets.end(), '\n') == 1 + 3 * 5);
  const auto tokens = testing::read_file(dir.file("tokens.csv"));
  CHECK(std::count(tokens.begin(), tokens.end(), '\n') == 13);
  const auto md = testing::read_file(dir.file("report.md"));
  CHECK(md.find("## Full/GPT-4.1") != std::string::npos);
}

TEST_CASE("runs with different task sets do not aggregate") {
  std::mt19937_64 rng(9);
  std::vector<RunArchive> archives = {testing::random_archive(rng, "Full_m_seed0", "a"),
                                      testing::random_archive(rng, "Full_m_seed1", "b")};
  archives[1].header.model_name = archives[0].header.model_name;
  CHECK_THROWS_AS(build_reports(archives, PriceTable::standard()), AggregationMismatch);
}
