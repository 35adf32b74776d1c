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

#pragma once

// Client for an OpenAI-compatible chat-completions endpoint.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "finsynth/backend.hpp"

namespace finsynth::backend {

struct BackendConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "FINSYNTH_API_KEY";
  int max_retries = 4;
  int backoff_ms = 500;
  int timeout_s = 60;
  int max_concurrency = 4;
  double temperature = 0.7;

  /// Throws BackendError(config_error) on negative retries or zero concurrency.
  void check() const;
};

/// Delay before retry `attempt` (0-based): base * 2^attempt plus up to one
/// base of jitter drawn from `jitter01` in [0, 1).
std::chrono::milliseconds backoff_delay(int base_ms, int attempt, double jitter01);

class LiveBackend : public TextGenerator {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit LiveBackend(BackendConfig config, Sleeper sleeper = {});
  ~LiveBackend() override;

  std::string complete(const std::string& prompt, const CallOptions& options) override;
  std::string name() const override { return "live:" + config_.model; }

  /// HTTP attempts made so far, over all calls.
  std::uint64_t attempts() const;

 private:
  struct State;
  BackendConfig config_;
  Sleeper sleeper_;
  std::unique_ptr<State> state_;
};

}  // namespace finsynth::backend
