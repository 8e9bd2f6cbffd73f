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

// Shared fixtures for unit and acceptance tests.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "kevo/core.hpp"
#include "kevo/llm_backend.hpp"
#include "kevo/orchestrator.hpp"
#include "kevo/run_config.hpp"

namespace kevo::testing {

inline std::string source_path(const std::string& rel) {
  return std::string(KEVO_SOURCE_DIR) + "/" + rel;
}

inline std::string cli_path() { return KEVO_CLI_PATH; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             ("kevo_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
                .string();
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

inline Task make_task(std::string id = "t0", Category cat = Category::kMatmul,
                      double baseline = 100.0) {
  Task t;
  t.id = std::move(id);
  t.category = cat;
  t.description = "toy kernel";
  t.reference_source = "def forward(x):\n    return x\n";
  t.initial_code = "__global__ void k() {}\n";
  t.baseline_mean_ms = baseline;
  return t;
}

inline std::string fenced(const std::string& body, const std::string& insight = {}) {
  std::string s = "Here you go.\n```cuda\n" + body + "\n```\n";
  if (!insight.empty()) s += "INSIGHT: " + insight + "\n";
  return s;
}

inline RetryPolicy no_sleep_retry() {
  RetryPolicy r;
  r.sleep = [](std::chrono::milliseconds) {};
  return r;
}

inline std::function<std::string()> fixed_clock() {
  return [] { return std::string("2026-01-01T00:00:00.000Z"); };
}

// Counts calls to an inner backend.
class CountingBackend final : public CompletionBackend {
 public:
  explicit CountingBackend(CompletionBackend& inner) : inner_(inner) {}
  Completion complete(std::string_view prompt, const GenerationParams& params,
                      std::size_t trial_index) override {
    ++calls;
    return inner_.complete(prompt, params, trial_index);
  }
  std::string describe() const override { return "counting(" + inner_.describe() + ")"; }
  int calls = 0;

 private:
  CompletionBackend& inner_;
};

// Fails the first `failures` calls, then answers with `reply`.
class FlakyBackend final : public CompletionBackend {
 public:
  FlakyBackend(int failures, std::string reply, bool retriable = true)
      : failures_(failures), reply_(std::move(reply)), retriable_(retriable) {}
  Completion complete(std::string_view, const GenerationParams&, std::size_t) override {
    ++calls;
    if (calls <= failures_) throw TransportError("flaky", retriable_, TokenUsage{10, 1});
    return Completion{reply_, TokenUsage{100, 20}, 1.0};
  }
  std::string describe() const override { return "flaky"; }
  int calls = 0;

 private:
  int failures_;
  std::string reply_;
  bool retriable_;
};

inline RunConfig scripted_config(StrategyName name, std::uint64_t seed = 0) {
  auto cfg = RunConfig::for_strategy(name);
  cfg.seed = seed;
  cfg.runs_repeat = 1;
  return cfg;
}

}  // namespace kevo::testing
