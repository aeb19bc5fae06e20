// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>

#include <nlohmann/json.hpp>

#include "pricescope/trace.hpp"

namespace pricescope {

struct RpcOptions {
    unsigned timeoutSecs = 60;
    unsigned maxRetries = 3;
    std::chrono::milliseconds backoff{500};
};

//! One JSON-RPC 2.0 call; returns "result". Transport failures (after retries) and error
//! replies throw NetworkError.
nlohmann::json rpc_call(const std::string& endpoint, const std::string& method, const nlohmann::json& params,
                        const RpcOptions& opts = {});

//! Converts a geth callTracer frame (withLog) into the fixture call tree. Logs of reverted
//! frames are dropped.
CallFrame frame_from_call_tracer(const nlohmann::json& call, std::uint32_t depth = 0);

//! eth_getTransactionByHash + eth_chainId + debug_traceTransaction(callTracer, withLog).
//! Throws TxNotFound, TracerUnsupported, NetworkError.
TransactionTrace fetch_trace(const std::string& endpoint, const Hash32& txHash, const RpcOptions& opts = {});

}  // namespace pricescope
