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
#include <sys/wait.h>

#include <cstdio>

#include "kevo/archive.hpp"
#include "support/support.hpp"

using namespace kevo;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome sh(const std::string& args) {
  const std::string cmd = testing::cli_path() + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), p)) out.append(buf, n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string cfg(const std::string& name) { return testing::source_path("configs/" + name); }

}  // namespace

TEST_CASE("run writes one archive per task and repeat") {
  testing::TempDir dir;
  const auto r = sh("run --config " + cfg("solution.json") + " --out " + dir.path() +
                    " --parallel-tasks 2 --repeats 2 --seed 5");
  CHECK(r.code == 0);
  for (const char* seed : {"seed5", "seed6"}) {
    for (const char* task : {"matmul_square", "softmax_rows", "cumsum_rows"}) {
      const auto path = archive_path(dir.path(), std::string("Solution_scripted_") + seed, task);
      const auto a = load_archive(path).archive;
      CHECK(a.complete());
      CHECK(a.records.size() == 45);
    }
  }
}

TEST_CASE("usage errors exit with 2") {
  testing::TempDir dir;
  CHECK(sh("run --config " + cfg("full.json") + " --task nope --out " + dir.path()).code == 2);
  CHECK(sh("run --config /nonexistent.json").code == 2);
  CHECK(sh("run --config " + cfg("full.json") + " --backend pigeon").code == 2);
  CHECK(sh("report --archives " + dir.path()).code == 2);
  CHECK(sh("frobnicate").code == 2);
  const auto one_line = sh("run --config " + cfg("full.json") + " --task nope");
  CHECK(std::count(one_line.out.begin(), one_line.out.end(), '\n') == 1);
}

TEST_CASE("unreachable remote backend exits with 3") {
  testing::TempDir dir;
  const auto conf = dir.file("remote.json");
  testing::write_file(conf, R"({"strategy":"Free","budget_trials":3,"runs_repeat":1,
    "tasks_file":")" + testing::source_path("data/tasks/synthetic_tasks.json") + R"(",
    "generation":{"model":"GPT-4.1","max_retries":0,"request_timeout_s":1},
    "backend":{"kind":"remote","base_url":"http://127.0.0.1:1/v1"}})");
  const auto r = sh("run --config " + conf + " --task softmax_rows --out " + dir.path());
  CHECK(r.code == 3);
  const auto a = load_archive(archive_path(dir.path(), "Free_GPT-4.1_seed0", "softmax_rows"));
  CHECK(a.archive.aborted());
  CHECK(a.archive.records.empty());
}

TEST_CASE("resume finishes a truncated archive") {
  testing::TempDir dir;
  REQUIRE(sh("run --config " + cfg("full.json") + " --task cumsum_rows --repeats 1 --out " +
             dir.path())
              .code == 0);
  const auto path = archive_path(dir.path(), "Full_scripted_seed0", "cumsum_rows");
  const auto full = load_archive(path).archive;
  const auto text = testing::read_file(path);
  std::size_t cut = 0;
  for (int i = 0; i < 21; ++i) cut = text.find('\n', cut) + 1;
  testing::write_file(path, text.substr(0, cut));
  const auto r = sh("resume --config " + cfg("full.json") + " --archive " + path);
  CHECK(r.code == 0);
  CHECK(canonical_hash(load_archive(path).archive) == canonical_hash(full));
  CHECK(sh("resume --config " + cfg("free.json") + " --archive " + path).code == 2);
}

TEST_CASE("report writes csv and markdown") {
  testing::TempDir dir;
  REQUIRE(sh("run --config " + cfg("insight.json") + " --out " + dir.path()).code == 0);
  CHECK(sh("report --archives " + dir.path()).code == 0);
  CHECK(sh("report --archives " + dir.path() + " --format md --out " + dir.file("md")).code ==
        0);
  const auto summary = testing::read_file(dir.file("summary.csv"));
  CHECK(summary.find("Insight/scripted,overall,3,3,") != std::string::npos);
  CHECK(testing::read_file(dir.file("md/report.md")).find("# Search report") == 0);
}

TEST_CASE("validate-task flags broken tasks") {
  testing::TempDir dir;
  CHECK(sh("validate-task --tasks " + testing::source_path("data/tasks/synthetic_tasks.json"))
            .code == 0);
  testing::write_file(dir.file("bad.json"),
                      R"([{"id":"x","category":"loss","initial_code":"","baseline_mean_ms":-1}])");
  const auto r = sh("validate-task --tasks " + dir.file("bad.json"));
  CHECK(r.code == 2);
  CHECK(r.out.find("baseline_mean_ms") != std::string::npos);
}
