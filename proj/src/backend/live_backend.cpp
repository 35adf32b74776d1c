// Copyright 2026 The finsynth Authors.
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

#include "finsynth/live_backend.hpp"

#include <atomic>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "finsynth/rng.hpp"

namespace finsynth::backend {
namespace {

constexpr const char* kSystemPrompt =
    "You are a careful financial analyst who writes report material on request.";

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw BackendError(Errc::config_error, "endpoint '" + url + "' has no scheme");
  }
  auto slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

std::string content_of(const std::string& body) {
  auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded()) throw BackendError(Errc::malformed_response, "response is not JSON");
  try {
    return json.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError(Errc::malformed_response, "response has no choices[0].message.content");
  }
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

struct LiveBackend::State {
  explicit State(int slots) : slots(slots) {}
  std::counting_semaphore<1024> slots;
  std::atomic<std::uint64_t> attempts{0};
};

void BackendConfig::check() const {
  if (max_retries < 0) throw BackendError(Errc::config_error, "max_retries must be >= 0");
  if (max_concurrency < 1) throw BackendError(Errc::config_error, "max_concurrency must be >= 1");
  if (max_concurrency > 1024) throw BackendError(Errc::config_error, "max_concurrency too large");
  if (backoff_ms < 0) throw BackendError(Errc::config_error, "backoff_ms must be >= 0");
  if (timeout_s < 1) throw BackendError(Errc::config_error, "timeout_s must be >= 1");
  split_endpoint(endpoint);
}

std::chrono::milliseconds backoff_delay(int base_ms, int attempt, double jitter01) {
  const double base = static_cast<double>(base_ms);
  const double delay = base * static_cast<double>(1ull << std::min(attempt, 20)) + base * jitter01;
  return std::chrono::milliseconds(static_cast<std::int64_t>(delay));
}

LiveBackend::LiveBackend(BackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  config_.check();
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  state_ = std::make_unique<State>(config_.max_concurrency);
}

LiveBackend::~LiveBackend() = default;

std::uint64_t LiveBackend::attempts() const { return state_->attempts.load(); }

std::string LiveBackend::complete(const std::string& prompt, const CallOptions& options) {
  // The key is read per call and never stored or logged.
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw BackendError(Errc::auth_error,
                       "environment variable " + config_.api_key_env + " is not set");
  }

  const Endpoint ep = split_endpoint(config_.endpoint);
  nlohmann::json body = {
      {"model", config_.model},
      {"messages",
       {{{"role", "system"}, {"content", kSystemPrompt}}, {{"role", "user"}, {"content", prompt}}}},
      {"temperature", options.temperature},
      {"seed", options.seed % (1ull << 53)},
  };
  const std::string payload = body.dump();

  state_->slots.acquire();
  struct Release {
    State* s;
    ~Release() { s->slots.release(); }
  } release{state_.get()};

  httplib::Client client(ep.origin);
  client.set_connection_timeout(config_.timeout_s, 0);
  client.set_read_timeout(config_.timeout_s, 0);
  client.set_write_timeout(config_.timeout_s, 0);
  client.set_bearer_token_auth(key);

  Errc last = Errc::unreachable;
  std::string last_message;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      Rng jitter(derive_seed(options.seed, "backoff", static_cast<std::uint64_t>(attempt)));
      sleeper_(backoff_delay(config_.backoff_ms, attempt - 1, jitter.uniform01()));
    }
    ++state_->attempts;
    auto res = client.Post(ep.path + "/chat/completions", payload, "application/json");
    if (!res) {
      const auto err = res.error();
      last = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                 ? Errc::timeout
                 : Errc::unreachable;
      last_message = "request to " + ep.origin + " failed: " + httplib::to_string(err);
      continue;
    }
    const int status = res->status;
    if (status >= 200 && status < 300) return content_of(res->body);
    if (status == 401 || status == 403) {
      throw BackendError(Errc::auth_error, "endpoint rejected the API key (HTTP " +
                                               std::to_string(status) + ")");
    }
    if (!retryable_status(status)) {
      throw BackendError(Errc::http_error, "HTTP " + std::to_string(status));
    }
    last = status == 429 ? Errc::rate_limited : Errc::http_error;
    last_message = "HTTP " + std::to_string(status) + " after " + std::to_string(attempt + 1) +
                   " attempt(s)";
  }
  throw BackendError(last, last_message);
}

}  // namespace finsynth::backend
