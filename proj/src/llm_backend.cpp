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

#include "kevo/llm_backend.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace kevo {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

void GenerationParams::validate() const {
  if (model_name.empty()) throw ConfigError("model_name must be non-empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
  if (!(request_timeout_s > 0.0)) throw ConfigError("request_timeout_s must be > 0");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

std::chrono::milliseconds RetryPolicy::backoff_for(int retry) const {
  const double ms = static_cast<double>(initial_backoff.count()) *
                    std::pow(multiplier, static_cast<double>(retry));
  const double capped = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

GenerationResult generate(CompletionBackend& backend, std::string_view prompt,
                          const GenerationParams& params, std::size_t trial_index,
                          const RetryPolicy& retry) {
  if (prompt.empty()) throw ContractViolation("generate needs a non-empty prompt");
  GenerationResult result;
  for (int attempt = 0;; ++attempt) {
    ++result.attempts;
    try {
      result.completion = backend.complete(prompt, params, trial_index);
    } catch (const TransportError& e) {
      result.total_usage += e.usage();
      if (!e.retriable() || attempt >= params.max_retries) {
        throw BackendUnavailable(
            fmt::format("{} unavailable after {} attempt(s): {}", backend.describe(),
                        result.attempts, e.what()),
            result.total_usage, result.attempts);
      }
      const auto delay = retry.backoff_for(attempt);
      if (retry.sleep) {
        retry.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
      continue;
    }
    result.total_usage += result.completion.usage;
    if (is_blank(result.completion.text)) {
      throw EmptyCompletion(fmt::format("{} returned an empty completion", backend.describe()),
                            result.total_usage, result.attempts);
    }
    return result;
  }
}

ScriptedCorpus ScriptedCorpus::from_text(std::string_view text, bool cycle) {
  ScriptedCorpus corpus;
  corpus.cycle = cycle;
  std::string current;
  std::size_t pos = 0;
  bool any = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line == kCorpusSeparator) {
      if (current.ends_with('\n')) current.pop_back();
      corpus.replies.push_back(std::move(current));
      current.clear();
      any = false;
    } else if (nl != std::string_view::npos || !line.empty()) {
      current.append(text.substr(pos, end - pos));
      if (nl != std::string_view::npos) current.push_back('\n');
      any = true;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (any) {
    if (current.ends_with('\n')) current.pop_back();
    corpus.replies.push_back(std::move(current));
  }
  return corpus;
}

ScriptedCorpus ScriptedCorpus::load(const std::string& path, bool cycle) {
  const fs::path p(path);
  if (fs::is_regular_file(p)) return from_text(read_file(p), cycle);
  if (!fs::is_directory(p)) {
    throw ConfigError(fmt::format("scripted corpus '{}' does not exist", path));
  }
  std::vector<std::pair<std::uint64_t, fs::path>> numbered;
  for (const auto& entry : fs::directory_iterator(p)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), n);
    if (ec != std::errc{} || ptr != stem.data() + stem.size()) continue;
    numbered.emplace_back(n, entry.path());
  }
  std::sort(numbered.begin(), numbered.end());
  ScriptedCorpus corpus;
  corpus.cycle = cycle;
  for (const auto& [n, file] : numbered) corpus.replies.push_back(read_file(file));
  if (corpus.replies.empty()) {
    throw ConfigError(fmt::format("scripted corpus '{}' has no numbered reply files", path));
  }
  return corpus;
}

ScriptedCorpus ScriptedCorpus::permuted(std::uint64_t seed) const {
  ScriptedCorpus out = *this;
  std::mt19937_64 rng(seed);
  std::shuffle(out.replies.begin(), out.replies.end(), rng);
  return out;
}

std::size_t whitespace_units(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

Completion scripted_generate(const ScriptedCorpus& corpus, std::size_t trial_index,
                             std::string_view prompt) {
  if (corpus.replies.empty()) throw ScriptExhausted("scripted corpus is empty");
  std::size_t idx = trial_index;
  if (idx >= corpus.replies.size()) {
    if (!corpus.cycle) {
      throw ScriptExhausted(fmt::format("scripted corpus has {} entries, trial {} requested",
                                        corpus.replies.size(), trial_index));
    }
    idx %= corpus.replies.size();
  }
  Completion c;
  c.text = corpus.replies[idx];
  c.usage.input_tokens = whitespace_units(prompt);
  c.usage.output_tokens = whitespace_units(c.text);
  return c;
}

Completion ScriptedBackend::complete(std::string_view prompt, const GenerationParams&,
                                     std::size_t trial_index) {
  return scripted_generate(corpus_, trial_index, prompt);
}

std::string ScriptedBackend::describe() const {
  return fmt::format("scripted backend ({} replies)", corpus_.replies.size());
}

PriceTable PriceTable::standard() {
  PriceTable t;
  const ModelPrice gpt{2.00, 8.00};
  const ModelPrice deepseek{0.56, 1.68};
  const ModelPrice sonnet{3.00, 15.00};
  t.set("GPT-4.1", gpt);
  t.set("gpt-4.1-2025-04-14", gpt);
  t.set("DeepSeekV3.1", deepseek);
  t.set("deepseek-v3-1-250821", deepseek);
  t.set("Claude-Sonnet-4", sonnet);
  t.set("claude-sonnet-4-20250514", sonnet);
  t.set("scripted", ModelPrice{0.0, 0.0});
  return t;
}

void PriceTable::set(const std::string& model, ModelPrice price) {
  if (!(price.input_usd_per_million >= 0.0) || !(price.output_usd_per_million >= 0.0)) {
    throw ConfigError(fmt::format("price for '{}' must be >= 0", model));
  }
  prices_[model] = price;
}

bool PriceTable::contains(std::string_view model) const {
  return prices_.find(model) != prices_.end();
}

const ModelPrice& PriceTable::at(std::string_view model) const {
  auto it = prices_.find(model);
  if (it == prices_.end()) throw MissingPrice(fmt::format("no price for model '{}'", model));
  return it->second;
}

double cost(const TokenUsage& usage, std::string_view model_name, const PriceTable& prices) {
  const auto& p = prices.at(model_name);
  return static_cast<double>(usage.input_tokens) * p.input_usd_per_million / 1e6 +
         static_cast<double>(usage.output_tokens) * p.output_usd_per_million / 1e6;
}

}  // namespace kevo
