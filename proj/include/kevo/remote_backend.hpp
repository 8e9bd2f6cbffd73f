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

#include <memory>
#include <string>

#include "kevo/llm_backend.hpp"

namespace kevo {

struct RemoteConfig {
  // e.g. "https://api.openai.com/v1"; requests go to <base_url>/chat/completions.
  std::string base_url;
  // Environment variable holding the bearer credential. Empty: no auth header.
  std::string api_key_env;
  // Ceiling on in-flight requests across every task loop sharing the backend.
  int max_concurrency = 4;
};

// Generic chat-completions client: one user message in, first choice out.
// HTTP 408/429/5xx and connection failures are retriable transport errors;
// other 4xx statuses are not.
class RemoteBackend final : public CompletionBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  ~RemoteBackend() override;

  Completion complete(std::string_view prompt, const GenerationParams& params,
                      std::size_t trial_index) override;
  std::string describe() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kevo
