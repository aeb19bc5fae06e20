// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "pricescope/llm.hpp"
#include "support/mock_server.hpp"

using namespace pricescope;
using pricescope::testing::MockServer;
using nlohmann::json;

namespace {

InferenceBackendConfig cfg_for(const MockServer& s) {
    InferenceBackendConfig cfg;
    cfg.kind = BackendKind::LlmTypeI;
    cfg.endpoint = s.url() + "/v1/chat/completions";
    cfg.model = "test-model";
    cfg.backoff = std::chrono::milliseconds(1);
    cfg.timeoutSecs = 5;
    cfg.apiKey = "secret";
    return cfg;
}

std::string completion(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

}  // namespace

TEST(Llm, RequestBodyPinsSampling) {
    InferenceBackendConfig cfg;
    cfg.model = "m";
    json body = chat_request_body(cfg, {"sys", "usr"});
    EXPECT_EQ(body["model"], "m");
    EXPECT_EQ(body["temperature"], 0.0);
    EXPECT_EQ(body["top_p"], 1.0);
    ASSERT_EQ(body["messages"].size(), 2u);
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][1]["content"], "usr");
}

TEST(Llm, SplitsUrls) {
    EXPECT_EQ(split_url("http://h:1/a/b").first, "http://h:1");
    EXPECT_EQ(split_url("http://h:1/a/b").second, "/a/b");
    EXPECT_EQ(split_url("https://h").second, "/");
    EXPECT_THROW(split_url("h/a"), InvalidArgument);
}

TEST(Llm, RoundTripWithBearerToken) {
    MockServer s;
    std::string auth, body;
    s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        auth = req.get_header_value("Authorization");
        body = req.body;
        res.set_content(completion("Statement 1: 9\nStatement 2: 2"), "application/json");
    });
    s.start();
    EXPECT_EQ(query_backend(cfg_for(s), {"sys", "usr"}), "Statement 1: 9\nStatement 2: 2");
    EXPECT_EQ(auth, "Bearer secret");
    EXPECT_EQ(json::parse(body)["messages"][1]["content"], "usr");
}

TEST(Llm, RetriesServerErrorsThenSucceeds) {
    MockServer s;
    std::atomic<int> calls{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content(completion("ok"), "application/json");
    });
    s.start();
    EXPECT_EQ(query_backend(cfg_for(s), {"s", "u"}), "ok");
    EXPECT_EQ(calls, 3);
}

TEST(Llm, RateLimitedAfterRetries) {
    MockServer s;
    std::atomic<int> calls{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 429;
    });
    s.start();
    EXPECT_THROW(query_backend(cfg_for(s), {"s", "u"}), RateLimited);
    EXPECT_EQ(calls, 4);  // first try plus three retries
}

TEST(Llm, ClientErrorIsNotRetried) {
    MockServer s;
    std::atomic<int> calls{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 401;
    });
    s.start();
    EXPECT_THROW(query_backend(cfg_for(s), {"s", "u"}), NetworkError);
    EXPECT_EQ(calls, 1);
}

TEST(Llm, ConnectionRefusedIsNetworkError) {
    int port;
    {
        MockServer s;
        s.start();
        port = s.port;
    }
    InferenceBackendConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.backoff = std::chrono::milliseconds(1);
    cfg.timeoutSecs = 2;
    EXPECT_THROW(query_backend(cfg, {"s", "u"}), NetworkError);
}

TEST(Llm, SlowServerTimesOut) {
    MockServer s;
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1500));
        res.set_content(completion("late"), "application/json");
    });
    s.start();
    auto cfg = cfg_for(s);
    cfg.timeoutSecs = 1;
    cfg.maxRetries = 0;
    EXPECT_THROW(query_backend(cfg, {"s", "u"}), Timeout);
}

TEST(Llm, MalformedCompletionIsUnparseable) {
    MockServer s;
    s.server.Post("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
    s.start();
    EXPECT_THROW(query_backend(cfg_for(s), {"s", "u"}), UnparseableResponse);
}

TEST(Llm, MissingEndpointRejected) {
    EXPECT_THROW(HttpLlmClient(InferenceBackendConfig{}), InvalidArgument);
}
