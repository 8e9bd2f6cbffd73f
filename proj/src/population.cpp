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

#include "kevo/population.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace kevo {

std::string_view to_string(PopulationStrategy s) {
  switch (s) {
    case PopulationStrategy::kSingleBest: return "SingleBest";
    case PopulationStrategy::kElite: return "Elite";
    case PopulationStrategy::kIslands: return "Islands";
  }
  return "?";
}

PopulationStrategy parse_population_strategy(std::string_view name) {
  if (name == "SingleBest") return PopulationStrategy::kSingleBest;
  if (name == "Elite") return PopulationStrategy::kElite;
  if (name == "Islands") return PopulationStrategy::kIslands;
  throw ConfigError(fmt::format("unknown population strategy '{}'", name));
}

void PopulationConfig::validate() const {
  if (capacity < 1) throw ConfigError("population capacity must be >= 1");
  if (island_count < 1) throw ConfigError("island_count must be >= 1");
}

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (*a.fitness != *b.fitness) return *a.fitness > *b.fitness;
  return a.trial_index < b.trial_index;
}

Population::Population(PopulationConfig config) : config_(config) {
  config_.validate();
  if (config_.strategy == PopulationStrategy::kSingleBest) config_.capacity = 1;
  const std::size_t n =
      config_.strategy == PopulationStrategy::kIslands ? config_.island_count : 1;
  islands_.resize(n);
}

std::vector<Candidate>& Population::bucket_for(const Candidate& cand) {
  if (config_.strategy != PopulationStrategy::kIslands) return islands_.front();
  return islands_[island_route(cand.trial_index)];
}

void Population::insert(const Candidate& cand) {
  if (cand.status != Status::kValid || !cand.fitness) {
    throw ContractViolation(fmt::format(
        "population insert needs a Valid candidate with fitness, got {} ({})",
        cand.id, to_string(cand.status)));
  }
  auto& members = bucket_for(cand);
  ++total_inserted_;

  if (config_.strategy == PopulationStrategy::kSingleBest) {
    if (members.empty() || *cand.fitness > *members.front().fitness) {
      members.assign(1, cand);
    }
    return;
  }

  auto pos = std::upper_bound(members.begin(), members.end(), cand, ranks_before);
  if (static_cast<std::size_t>(pos - members.begin()) >= config_.capacity) return;
  members.insert(pos, cand);
  if (members.size() > config_.capacity) members.pop_back();
}

std::optional<Candidate> Population::incumbent() const {
  const Candidate* best = nullptr;
  for (const auto& island : islands_) {
    if (!island.empty() && (best == nullptr || ranks_before(island.front(), *best))) {
      best = &island.front();
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::optional<Candidate> Population::incumbent_for(std::size_t trial_index) const {
  if (config_.strategy != PopulationStrategy::kIslands) return incumbent();
  const auto& island = islands_[island_route(trial_index)];
  if (island.empty()) return std::nullopt;
  return island.front();
}

std::vector<Candidate> Population::context_solutions(std::size_t n,
                                                     std::size_t trial_index) const {
  const auto& src = config_.strategy == PopulationStrategy::kIslands
                        ? islands_[island_route(trial_index)]
                        : islands_.front();
  const std::size_t take = std::min(n, src.size());
  return {src.begin(), src.begin() + static_cast<std::ptrdiff_t>(take)};
}

std::size_t Population::island_route(std::size_t trial_index) const {
  if (config_.strategy != PopulationStrategy::kIslands) {
    throw ContractViolation(fmt::format("island_route called on a {} population",
                                        to_string(config_.strategy)));
  }
  return trial_index % config_.island_count;
}

std::vector<Candidate> Population::members() const {
  std::vector<Candidate> out;
  for (const auto& island : islands_) out.insert(out.end(), island.begin(), island.end());
  std::stable_sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::size_t Population::size() const {
  std::size_t n = 0;
  for (const auto& island : islands_) n += island.size();
  return n;
}

}  // namespace kevo
