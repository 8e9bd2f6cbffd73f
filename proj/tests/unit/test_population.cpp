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

#include "kevo/population.hpp"
#include "oracles/oracles.hpp"

using namespace kevo;

namespace {

Candidate valid(std::size_t trial, double fitness) {
  Candidate c;
  c.id = std::to_string(trial);
  c.trial_index = trial;
  c.status = Status::kValid;
  c.fitness = fitness;
  return c;
}

std::vector<std::string> ids(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}

}  // namespace

TEST_CASE("insert rejects infeasible candidates") {
  Population p(PopulationConfig{PopulationStrategy::kElite, 4, 5});
  Candidate bad = valid(0, 1.0);
  bad.status = Status::kTestFailure;
  CHECK_THROWS_AS(p.insert(bad), ContractViolation);
  Candidate no_fit = valid(1, 1.0);
  no_fit.fitness.reset();
  CHECK_THROWS_AS(p.insert(no_fit), ContractViolation);
  CHECK(p.empty());
}

TEST_CASE("single best keeps the earlier of two equal candidates") {
  Population p(PopulationConfig{PopulationStrategy::kSingleBest, 1, 5});
  p.insert(valid(0, 2.0));
  p.insert(valid(1, 2.0));
  CHECK(p.incumbent()->id == "0");
  p.insert(valid(2, 1.5));
  CHECK(p.incumbent()->id == "0");
  p.insert(valid(3, 2.5));
  CHECK(p.incumbent()->id == "3");
  CHECK(p.size() == 1);
  CHECK(p.total_inserted() == 4);
}

TEST_CASE("elite keeps the top k in ranking order") {
  Population p(PopulationConfig{PopulationStrategy::kElite, 3, 5});
  for (auto [t, f] : std::vector<std::pair<int, double>>{{0, 1.0}, {1, 3.0}, {2, 2.0},
                                                         {3, 3.0}, {4, 0.5}, {5, 2.5}}) {
    p.insert(valid(t, f));
  }
  CHECK(ids(p.members()) == std::vector<std::string>{"1", "3", "5"});
  CHECK(ids(p.context_solutions(2)) == std::vector<std::string>{"1", "3"});
}

TEST_CASE("elite k=2 over 1,3,2,5") {
  Population p(PopulationConfig{PopulationStrategy::kElite, 2, 5});
  std::vector<Candidate> seen;
  const double fits[] = {1, 3, 2, 5};
  for (std::size_t t = 0; t < 4; ++t) {
    seen.push_back(valid(t, fits[t]));
    p.insert(seen.back());
  }
  CHECK(ids(p.members()) == std::vector<std::string>{"3", "1"});
  CHECK(ids(p.members()) == oracle::top_k(seen, 2));
}

TEST_CASE("islands route by trial index and never migrate") {
  Population p(PopulationConfig{PopulationStrategy::kIslands, 2, 3});
  CHECK(p.island_route(7) == 1);
  p.insert(valid(0, 1.0));
  p.insert(valid(1, 5.0));
  p.insert(valid(3, 2.0));
  CHECK(p.islands()[0].size() == 2);
  CHECK(p.islands()[1].size() == 1);
  CHECK(p.incumbent_for(6)->id == "3");
  CHECK(p.incumbent_for(4)->id == "1");
  CHECK(p.incumbent()->id == "1");
  CHECK(ids(p.context_solutions(4, 3)) == std::vector<std::string>{"3", "0"});

  Population e(PopulationConfig{PopulationStrategy::kElite, 2, 3});
  CHECK_THROWS_AS(e.island_route(0), ContractViolation);
}

TEST_CASE("elite membership equals brute-force top-k over random sequences") {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 300; ++round) {
    const std::size_t k = 1 + rng() % 6;
    Population p(PopulationConfig{PopulationStrategy::kElite, k, 5});
    std::vector<Candidate> seen;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int t = 0; t < n; ++t) {
      // Coarse fitness values force frequent ties.
      const auto c = valid(static_cast<std::size_t>(t), 0.25 * static_cast<double>(rng() % 12));
      p.insert(c);
      seen.push_back(c);
      REQUIRE(ids(p.members()) == oracle::top_k(seen, k));
    }
  }
}

TEST_CASE("population config validation") {
  CHECK_THROWS_AS((PopulationConfig{PopulationStrategy::kElite, 0, 5}.validate()), ConfigError);
  CHECK_THROWS_AS((PopulationConfig{PopulationStrategy::kIslands, 2, 0}.validate()),
                  ConfigError);
  CHECK(parse_population_strategy(to_string(PopulationStrategy::kIslands)) ==
        PopulationStrategy::kIslands);
}
