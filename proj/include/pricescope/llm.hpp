// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pricescope/inference.hpp"

namespace pricescope {

struct InferenceBackendConfig {
    BackendKind kind = BackendKind::Analytic;
    //! Full chat-completions URL, e.g. "https://api.example.com/v1/chat/completions".
    std::optional<std::string> endpoint;
    std::string model = "gpt-4o";
    //! Sampling is pinned for reproducible answers.
    static constexpr double temperature = 0.0;
    static constexpr double topP = 1.0;
    unsigned maxConcurrent = 4;
    unsigned timeoutSecs = 60;
    unsigned maxRetries = 3;
    std::chrono::milliseconds backoff{500};
    //! Bearer token; falls back to PRICESCOPE_LLM_KEY when unset.
    std::optional<std::string> apiKey;
    //! Root of per-contract source bundle directories.
    std::optional<std::string> sourcesDir;
    //! Signature keywords for price-function extraction; empty means the defaults.
    std::vector<std::string> keywords;
};

//! {model, messages:[{role,content}], temperature:0, top_p:1}
nlohmann::json chat_request_body(const InferenceBackendConfig& cfg, const Prompt& prompt);

//! choices[0].message.content; throws UnparseableResponse on other shapes.
std::string chat_response_content(const std::string& body);

class LlmClient {
  public:
    virtual ~LlmClient() = default;
    //! One completion for the prompt. Throws NetworkError, RateLimited, Timeout.
    virtual std::string complete(const Prompt& prompt) = 0;
};

class HttpLlmClient : public LlmClient {
  public:
    //! Throws InvalidArgument when no endpoint is configured.
    explicit HttpLlmClient(InferenceBackendConfig cfg);
    std::string complete(const Prompt& prompt) override;

  private:
    InferenceBackendConfig cfg_;
    std::string base_;
    std::string path_;
};

//! Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> split_url(const std::string& url);

//! HttpLlmClient(cfg).complete(prompt)
std::string query_backend(const InferenceBackendConfig& cfg, const Prompt& prompt);

}  // namespace pricescope
