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

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "kevo/core.hpp"

namespace kevo {

enum class PopulationStrategy { kSingleBest, kElite, kIslands };

std::string_view to_string(PopulationStrategy s);
PopulationStrategy parse_population_strategy(std::string_view name);

struct PopulationConfig {
  PopulationStrategy strategy = PopulationStrategy::kElite;
  // Elite: k. Islands: per-island capacity. SingleBest: always treated as 1.
  std::size_t capacity = 4;
  std::size_t island_count = 5;

  void validate() const;
  bool operator==(const PopulationConfig&) const = default;
};

// Ranking used everywhere a population is ordered: fitness descending, then
// the earlier trial wins.
bool ranks_before(const Candidate& a, const Candidate& b);

// Retained valid candidates. Members always carry a fitness and are kept in
// ranking order; islands are independent sub-populations with no migration.
class Population {
 public:
  explicit Population(PopulationConfig config);

  // Throws ContractViolation unless cand is Valid and has a fitness.
  void insert(const Candidate& cand);

  std::optional<Candidate> incumbent() const;

  // Best member of the island routed from trial_index (Islands), otherwise
  // the overall incumbent.
  std::optional<Candidate> incumbent_for(std::size_t trial_index) const;

  // Up to n members in ranking order. For Islands only the island routed
  // from trial_index contributes.
  std::vector<Candidate> context_solutions(std::size_t n,
                                           std::size_t trial_index = 0) const;

  // trial_index mod island_count. Throws ContractViolation on non-Islands.
  std::size_t island_route(std::size_t trial_index) const;

  const PopulationConfig& config() const { return config_; }
  // One list per island; a single list for SingleBest and Elite.
  const std::vector<std::vector<Candidate>>& islands() const { return islands_; }
  std::vector<Candidate> members() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::size_t total_inserted() const { return total_inserted_; }

  bool operator==(const Population&) const = default;

 private:
  std::vector<Candidate>& bucket_for(const Candidate& cand);

  PopulationConfig config_;
  std::vector<std::vector<Candidate>> islands_;
  std::size_t total_inserted_ = 0;
};

}  // namespace kevo
