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
#include <deque>
#include <vector>

#include "kevo/core.hpp"

namespace kevo {

// Bounded FIFO of optimization insights, oldest first.
class InsightStore {
 public:
  explicit InsightStore(std::size_t capacity = 10);

  void add(Insight insight);
  // The n most recent insights, oldest of them first.
  std::vector<Insight> recent(std::size_t n) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Insight>& items() const { return items_; }

  bool operator==(const InsightStore&) const = default;

 private:
  std::size_t capacity_;
  std::deque<Insight> items_;
};

}  // namespace kevo
