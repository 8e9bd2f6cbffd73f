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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kevo/core.hpp"

namespace kevo {

struct GenerationParams {
  std::string model_name = "scripted";
  double temperature = 1.0;
  int max_output_tokens = 8192;
  double request_timeout_s = 300.0;
  int max_retries = 3;

  void validate() const;
  bool operator==(const GenerationParams&) const = default;
};

struct Completion {
  std::string text;
  TokenUsage usage;
  double latency_ms = 0.0;
};

// Failure to reach the model. Usage is whatever the provider billed for the
// failed attempt (usually zero).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, bool retriable = true,
                          TokenUsage usage = {})
      : Error(what), retriable_(retriable), usage_(usage) {}
  bool retriable() const { return retriable_; }
  const TokenUsage& usage() const { return usage_; }

 private:
  bool retriable_;
  TokenUsage usage_;
};

class BackendUnavailable : public Error {
 public:
  BackendUnavailable(const std::string& what, TokenUsage usage, int attempts)
      : Error(what), usage_(usage), attempts_(attempts) {}
  const TokenUsage& usage() const { return usage_; }
  int attempts() const { return attempts_; }

 private:
  TokenUsage usage_;
  int attempts_;
};

// The provider answered with nothing usable (refusal or blank body).
class EmptyCompletion : public Error {
 public:
  EmptyCompletion(const std::string& what, TokenUsage usage, int attempts)
      : Error(what), usage_(usage), attempts_(attempts) {}
  const TokenUsage& usage() const { return usage_; }
  int attempts() const { return attempts_; }

 private:
  TokenUsage usage_;
  int attempts_;
};

// One model endpoint. Implementations must tolerate concurrent calls from
// several task loops.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Single attempt; throws TransportError on transport failure.
  virtual Completion complete(std::string_view prompt, const GenerationParams& params,
                              std::size_t trial_index) = 0;
  virtual std::string describe() const = 0;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};
  // Defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  std::chrono::milliseconds backoff_for(int retry) const;
};

struct GenerationResult {
  Completion completion;
  TokenUsage total_usage;  // summed over every attempt
  int attempts = 0;
};

// Calls backend.complete with up to params.max_retries retries on retriable
// transport failures, sleeping with exponential backoff between attempts.
// Throws BackendUnavailable once retries run out, EmptyCompletion on a blank
// reply, ContractViolation on an empty prompt.
GenerationResult generate(CompletionBackend& backend, std::string_view prompt,
                          const GenerationParams& params, std::size_t trial_index,
                          const RetryPolicy& retry = {});

// Replies served by trial index. Without cycling, asking past the end throws
// ScriptExhausted.
struct ScriptedCorpus {
  std::vector<std::string> replies;
  bool cycle = false;

  // A directory of numbered reply files (0.txt, 001.txt, ...) or one file
  // whose records are separated by a line holding exactly "=====".
  static ScriptedCorpus load(const std::string& path, bool cycle = false);
  static ScriptedCorpus from_text(std::string_view text, bool cycle = false);

  // Same replies in a seed-determined order.
  ScriptedCorpus permuted(std::uint64_t seed) const;
};

inline constexpr std::string_view kCorpusSeparator = "=====";

std::size_t whitespace_units(std::string_view text);

// Entry for trial_index with synthetic usage: input = whitespace units of the
// prompt, output = whitespace units of the reply.
Completion scripted_generate(const ScriptedCorpus& corpus, std::size_t trial_index,
                             std::string_view prompt);

class ScriptedBackend final : public CompletionBackend {
 public:
  explicit ScriptedBackend(ScriptedCorpus corpus) : corpus_(std::move(corpus)) {}
  Completion complete(std::string_view prompt, const GenerationParams& params,
                      std::size_t trial_index) override;
  std::string describe() const override;
  const ScriptedCorpus& corpus() const { return corpus_; }

 private:
  ScriptedCorpus corpus_;
};

struct ModelPrice {
  double input_usd_per_million = 0.0;
  double output_usd_per_million = 0.0;
};

class PriceTable {
 public:
  PriceTable() = default;
  // Published per-million-token prices for the three evaluated models, keyed
  // by both abbreviation and full model name.
  static PriceTable standard();

  // Throws ConfigError on a negative price.
  void set(const std::string& model, ModelPrice price);
  bool contains(std::string_view model) const;
  // Throws MissingPrice.
  const ModelPrice& at(std::string_view model) const;
  const std::map<std::string, ModelPrice, std::less<>>& entries() const { return prices_; }

 private:
  std::map<std::string, ModelPrice, std::less<>> prices_;
};

// USD for a token count. Throws MissingPrice for an unknown model.
double cost(const TokenUsage& usage, std::string_view model_name, const PriceTable& prices);

}  // namespace kevo
