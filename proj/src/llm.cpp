// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/llm.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace pricescope {

using nlohmann::json;

json chat_request_body(const InferenceBackendConfig& cfg, const Prompt& prompt) {
    return {{"model", cfg.model},
            {"messages", json::array({{{"role", "system"}, {"content", prompt.system}},
                                      {{"role", "user"}, {"content", prompt.user}}})},
            {"temperature", InferenceBackendConfig::temperature},
            {"top_p", InferenceBackendConfig::topP}};
}

std::string chat_response_content(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    try {
        if (!j.is_discarded()) return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
    }
    throw UnparseableResponse("response is not a chat completion: " + body.substr(0, 200));
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw InvalidArgument("URL needs a scheme: '" + url + "'");
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

HttpLlmClient::HttpLlmClient(InferenceBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.endpoint || cfg_.endpoint->empty()) throw InvalidArgument("LLM backend needs an endpoint");
    std::tie(base_, path_) = split_url(*cfg_.endpoint);
    if (!cfg_.apiKey) {
        if (const char* k = std::getenv("PRICESCOPE_LLM_KEY")) cfg_.apiKey = k;
    }
}

std::string HttpLlmClient::complete(const Prompt& prompt) {
    httplib::Client cli(base_);
    cli.set_connection_timeout(std::chrono::seconds(cfg_.timeoutSecs));
    cli.set_read_timeout(std::chrono::seconds(cfg_.timeoutSecs));
    cli.set_write_timeout(std::chrono::seconds(cfg_.timeoutSecs));
    httplib::Headers headers;
    if (cfg_.apiKey) headers.emplace("Authorization", "Bearer " + *cfg_.apiKey);
    const std::string body = chat_request_body(cfg_, prompt).dump();

    std::string last;
    bool timedOut = false;
    bool limited = false;
    for (unsigned attempt = 0; attempt <= cfg_.maxRetries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * (1u << (attempt - 1)));
        auto res = cli.Post(path_, headers, body, "application/json");
        if (!res) {
            timedOut = res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read;
            limited = false;
            last = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return chat_response_content(res->body);
        timedOut = false;
        limited = res->status == 429;
        last = "HTTP " + std::to_string(res->status);
        if (!limited && res->status < 500) break;  // client errors are not transient
    }
    std::string what = "LLM request to " + *cfg_.endpoint + " failed: " + last;
    if (limited) throw RateLimited(what);
    if (timedOut) throw Timeout(what);
    throw NetworkError(what);
}

std::string query_backend(const InferenceBackendConfig& cfg, const Prompt& prompt) {
    return HttpLlmClient(cfg).complete(prompt);
}

}  // namespace pricescope
