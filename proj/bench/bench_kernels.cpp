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

// Serial reference vs OpenMP for the two data-parallel kernels: per-archive
// outcome extraction and batch synthetic evaluation.

#include <benchmark/benchmark.h>

#include <random>

#include "kevo/evaluator.hpp"
#include "kevo/metrics.hpp"
#include "support/random_archives.hpp"

namespace {

std::vector<kevo::RunArchive> make_archives(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<kevo::RunArchive> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(kevo::testing::random_archive(rng, "r", "t" + std::to_string(i)));
  }
  return out;
}

std::vector<std::string> make_codes(std::size_t n) {
  std::mt19937_64 rng(2);
  static const char* kWords[] = {"VALID", "CORRECT", "FAST", "pad"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s = "k";
    for (int w = 0; w < 400; ++w) {
      s += ' ';
      s += kWords[rng() % 4];
    }
    out.push_back(std::move(s));
  }
  return out;
}

kevo::Task bench_task() {
  kevo::Task t;
  t.id = "bench";
  t.initial_code = "x";
  t.baseline_mean_ms = 100.0;
  return t;
}

void BM_OutcomesSerial(benchmark::State& state) {
  const auto archives = make_archives(static_cast<std::size_t>(state.range(0)));
  const auto prices = kevo::PriceTable::standard();
  for (auto _ : state) benchmark::DoNotOptimize(kevo::task_outcomes_serial(archives, prices));
}

void BM_OutcomesParallel(benchmark::State& state) {
  const auto archives = make_archives(static_cast<std::size_t>(state.range(0)));
  const auto prices = kevo::PriceTable::standard();
  for (auto _ : state) benchmark::DoNotOptimize(kevo::task_outcomes(archives, prices));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto codes = make_codes(static_cast<std::size_t>(state.range(0)));
  const auto task = bench_task();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kevo::evaluate_synthetic_batch_serial(codes, task, kevo::EvalConfig{}, {}));
  }
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto codes = make_codes(static_cast<std::size_t>(state.range(0)));
  const auto task = bench_task();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kevo::evaluate_synthetic_batch(codes, task, kevo::EvalConfig{}, {}));
  }
}

}  // namespace

BENCHMARK(BM_OutcomesSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OutcomesParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
