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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "finsynth/live_backend.hpp"

namespace finsynth::backend {
namespace {

using namespace std::chrono_literals;

// Local chat-completions stand-in that answers from a status script.
class StubServer {
 public:
  explicit StubServer(std::vector<int> statuses, std::string ok_body = reply("stub reply"))
      : statuses_(std::move(statuses)), ok_body_(std::move(ok_body)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int in = ++in_flight_;
      int seen = max_in_flight_.load();
      while (in > seen && !max_in_flight_.compare_exchange_weak(seen, in)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(req.body);
        auth_ = req.get_header_value("Authorization");
        const std::size_t i = calls_++;
        res.status = i < statuses_.size() ? statuses_[i] : 200;
      }
      if (res.status == 200) {
        res.set_content(ok_body_, "application/json");
      } else {
        res.set_content("{\"error\":\"scripted\"}", "application/json");
      }
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  static std::string reply(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
        .dump();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::string auth() const {
    std::lock_guard lock(mu_);
    return auth_;
  }
  int max_in_flight() const { return max_in_flight_; }
  void set_delay_ms(int ms) { delay_ms_ = ms; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<int> statuses_;
  std::string ok_body_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
  std::vector<std::string> bodies_;
  std::string auth_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::atomic<int> delay_ms_{0};
};

constexpr const char* kKeyEnv = "FINSYNTH_TEST_API_KEY";

class LiveBackendTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv(kKeyEnv, "sk-test", 1); }
  void TearDown() override { ::unsetenv(kKeyEnv); }

  BackendConfig config(const StubServer& s) const {
    BackendConfig c;
    c.endpoint = s.endpoint();
    c.api_key_env = kKeyEnv;
    c.max_retries = 3;
    c.backoff_ms = 10;
    c.timeout_s = 5;
    return c;
  }

  std::vector<std::chrono::milliseconds> sleeps;
  LiveBackend::Sleeper recorder() {
    return [this](std::chrono::milliseconds d) { sleeps.push_back(d); };
  }
};

Errc code_of(LiveBackend& b) {
  try {
    b.complete("prompt", {});
  } catch (const BackendError& e) {
    return e.code();
  }
  return Errc::config_error;
}

TEST(Backoff, ExponentialWithBoundedJitter) {
  EXPECT_EQ(backoff_delay(500, 0, 0.0), 500ms);
  EXPECT_EQ(backoff_delay(500, 1, 0.0), 1000ms);
  EXPECT_EQ(backoff_delay(500, 3, 0.5), 4250ms);
  EXPECT_LT(backoff_delay(500, 2, 0.999), 2500ms);
}

TEST(BackendConfigCheck, RejectsBadValues) {
  BackendConfig c;
  c.max_retries = -1;
  EXPECT_THROW(c.check(), BackendError);
  c = {};
  c.max_concurrency = 0;
  EXPECT_THROW(c.check(), BackendError);
  c = {};
  c.endpoint = "localhost:8080";
  EXPECT_THROW(c.check(), BackendError);
  EXPECT_NO_THROW(BackendConfig{}.check());
}

TEST_F(LiveBackendTest, RetriesRateLimitsThenSucceeds) {
  StubServer s({429, 429, 200});
  LiveBackend b(config(s), recorder());
  EXPECT_EQ(b.complete("hello", {0.2, 9}), "stub reply");
  EXPECT_EQ(s.calls(), 3u);
  EXPECT_EQ(b.attempts(), 3u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_GE(sleeps[0], 10ms);
  EXPECT_LT(sleeps[0], 20ms);
  EXPECT_GE(sleeps[1], 20ms);
  EXPECT_LT(sleeps[1], 30ms);
}

TEST_F(LiveBackendTest, SendsChatRequest) {
  StubServer s({});
  LiveBackend b(config(s), recorder());
  b.complete("the prompt", {0.25, 42});
  auto body = nlohmann::json::parse(s.bodies().at(0));
  EXPECT_EQ(body["model"], "gpt-3.5-turbo");
  EXPECT_EQ(body["temperature"], 0.25);
  EXPECT_EQ(body["seed"], 42);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "the prompt");
  EXPECT_EQ(s.auth(), "Bearer sk-test");
}

TEST_F(LiveBackendTest, ExhaustedRetriesReportLastFailure) {
  StubServer limited({429, 429, 429, 429, 429});
  LiveBackend a(config(limited), recorder());
  EXPECT_EQ(code_of(a), Errc::rate_limited);
  EXPECT_EQ(limited.calls(), 4u);
  EXPECT_EQ(sleeps.size(), 3u);

  StubServer failing({503, 500, 502, 504});
  LiveBackend b(config(failing), recorder());
  EXPECT_EQ(code_of(b), Errc::http_error);
  EXPECT_EQ(failing.calls(), 4u);
}

TEST_F(LiveBackendTest, ClientErrorsAreNotRetried) {
  StubServer unauthorized({401});
  LiveBackend a(config(unauthorized), recorder());
  EXPECT_EQ(code_of(a), Errc::auth_error);
  EXPECT_EQ(unauthorized.calls(), 1u);

  StubServer bad({400});
  LiveBackend b(config(bad), recorder());
  EXPECT_EQ(code_of(b), Errc::http_error);
  EXPECT_EQ(bad.calls(), 1u);
  EXPECT_TRUE(sleeps.empty());
}

TEST_F(LiveBackendTest, MalformedBodies) {
  StubServer not_json({}, "<html>");
  LiveBackend a(config(not_json), recorder());
  EXPECT_EQ(code_of(a), Errc::malformed_response);

  StubServer no_choices({}, "{\"choices\": []}");
  LiveBackend b(config(no_choices), recorder());
  EXPECT_EQ(code_of(b), Errc::malformed_response);
}

TEST_F(LiveBackendTest, MissingKeyFailsBeforeAnyRequest) {
  StubServer s({});
  ::unsetenv(kKeyEnv);
  LiveBackend b(config(s), recorder());
  EXPECT_EQ(code_of(b), Errc::auth_error);
  EXPECT_EQ(s.calls(), 0u);
  EXPECT_EQ(b.attempts(), 0u);
}

TEST_F(LiveBackendTest, UnreachableEndpoint) {
  std::string endpoint;
  {
    StubServer s({});
    endpoint = s.endpoint();
  }
  BackendConfig c;
  c.endpoint = endpoint;
  c.api_key_env = kKeyEnv;
  c.max_retries = 1;
  c.backoff_ms = 1;
  c.timeout_s = 2;
  LiveBackend b(c, recorder());
  EXPECT_EQ(code_of(b), Errc::unreachable);
  EXPECT_EQ(b.attempts(), 2u);
}

TEST_F(LiveBackendTest, ConcurrencyIsCapped) {
  StubServer s({});
  s.set_delay_ms(40);
  auto c = config(s);
  c.max_concurrency = 2;
  LiveBackend b(c, recorder());
  std::vector<std::thread> pool;
  for (int i = 0; i < 6; ++i) pool.emplace_back([&] { b.complete("p", {}); });
  for (auto& t : pool) t.join();
  EXPECT_EQ(s.calls(), 6u);
  EXPECT_LE(s.max_in_flight(), 2);
}

}  // namespace
}  // namespace finsynth::backend
