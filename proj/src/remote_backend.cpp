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

#include "kevo/remote_backend.hpp"

#include <fmt/core.h>
#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>

#include "kevo/json_io.hpp"

namespace kevo {

namespace {

// Blocks while `limit` requests are in flight.
class Gate {
 public:
  explicit Gate(int limit) : free_(limit) {}
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

class GateSlot {
 public:
  explicit GateSlot(Gate& g) : gate_(g) { gate_.acquire(); }
  ~GateSlot() { gate_.release(); }
  GateSlot(const GateSlot&) = delete;
  GateSlot& operator=(const GateSlot&) = delete;

 private:
  Gate& gate_;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError(fmt::format("base_url '{}' needs a scheme", url));
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_begin);
  out.path = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (out.path.ends_with('/')) out.path.pop_back();
  return out;
}

bool retriable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

struct RemoteBackend::Impl {
  RemoteConfig config;
  SplitUrl url;
  std::string api_key;
  Gate gate;

  explicit Impl(RemoteConfig c)
      : config(std::move(c)), url(split_url(config.base_url)), gate(config.max_concurrency) {}
};

RemoteBackend::RemoteBackend(RemoteConfig config) {
  if (config.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  impl_ = std::make_unique<Impl>(std::move(config));
  if (!impl_->config.api_key_env.empty()) {
    const char* key = std::getenv(impl_->config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError(fmt::format("environment variable {} is not set",
                                    impl_->config.api_key_env));
    }
    impl_->api_key = key;
  }
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::describe() const {
  return fmt::format("remote backend {}", impl_->config.base_url);
}

Completion RemoteBackend::complete(std::string_view prompt, const GenerationParams& params,
                                   std::size_t) {
  Json body{{"model", params.model_name},
            {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", params.temperature},
            {"max_tokens", params.max_output_tokens}};

  httplib::Client cli(impl_->url.origin);
  const auto timeout = std::chrono::duration<double>(params.request_timeout_s);
  cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!impl_->api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  httplib::Result res;
  {
    GateSlot slot(impl_->gate);
    res = cli.Post(impl_->url.path + "/chat/completions", headers,
                   body.dump(-1, ' ', false, Json::error_handler_t::replace),
                   "application/json");
  }
  const double latency = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();

  if (!res) {
    throw TransportError(fmt::format("request failed: {}", httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw TransportError(fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200)),
                         retriable_status(res->status));
  }

  Completion out;
  out.latency_ms = latency;
  try {
    const auto reply = Json::parse(res->body);
    if (auto it = reply.find("usage"); it != reply.end() && it->is_object()) {
      out.usage.input_tokens = it->value("prompt_tokens", std::uint64_t{0});
      out.usage.output_tokens = it->value("completion_tokens", std::uint64_t{0});
    }
    const auto& choices = reply.at("choices");
    if (!choices.empty()) {
      const auto& content = choices.at(0).at("message").at("content");
      if (content.is_string()) out.text = content.get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw TransportError(fmt::format("malformed completion body: {}", e.what()));
  }
  return out;
}

}  // namespace kevo
