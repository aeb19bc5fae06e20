// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pricescope/inference.hpp"
#include "pricescope/llm.hpp"
#include "pricescope/sources.hpp"

namespace pricescope {

//! Everything price inference reads from the earlier pipeline stages.
struct InferenceInput {
    const TransactionTrace& trace;
    const UserControlledSet& uc;
    const std::vector<TransferGraph>& graphs;
    const std::vector<PoolLabel>& pools;
    const std::vector<Segment>& segments;
    const std::map<Address, SourceBundle>& bundles;
};

//! Transfers of one segment, in time order.
std::vector<TransferAction> segment_transfers(const std::vector<TransferGraph>& graphs, const Segment& s);

//! One LLM question: statements about one contract after one segment.
struct PromptJob {
    Backend backend = Backend::LlmTypeI;
    Address contract;
    std::size_t segment = 0;
    VerdictAnchor anchor;
    std::vector<PriceStatement> statements;
    Prompt prompt;
};

//! Type-I jobs for verified contracts that appear in the transaction, Type-II jobs for
//! swap-labeled pools (closed-source ones only under Auto). Contracts in `skip` are left out.
std::vector<PromptJob> plan_prompts(const InferenceInput& in, const InferenceBackendConfig& cfg,
                                    const std::set<Address>& skip = {}, std::vector<Warning>* warnings = nullptr);

struct InferenceOutput {
    std::vector<PriceChangeVerdict> verdicts;  // ordered by anchor
    std::vector<Warning> warnings;
    bool timedOut = false;
};

//! Analytic backend for modeled pools and oracles, LLM prompts for the rest according to
//! cfg.kind; analytic verdicts win conflicts. Backend failures become warnings. With
//! kind == Analytic no client is created or used. `client` overrides the HTTP client.
InferenceOutput infer_price_changes(const InferenceInput& in, const InferenceBackendConfig& cfg,
                                    LlmClient* client = nullptr,
                                    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt);

}  // namespace pricescope
