// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "pricescope/rpc.hpp"
#include "pricescope/transfers.hpp"
#include "support/builder.hpp"
#include "support/mock_node.hpp"

using namespace pricescope;
using pricescope::testing::addr;
using pricescope::testing::MockServer;
using nlohmann::json;

namespace {

using pricescope::testing::kTx;
using pricescope::testing::MockNode;
using pricescope::testing::tracer_payload;

RpcOptions fast() {
    RpcOptions o;
    o.backoff = std::chrono::milliseconds(1);
    o.timeoutSecs = 2;
    return o;
}

}  // namespace

TEST(Rpc, FetchNormalizesCallTracerOutput) {
    MockNode node;
    auto t = fetch_trace(node.url(), kTx, fast());
    EXPECT_EQ(t.txHash, kTx);
    EXPECT_EQ(t.chainId, 1u);
    EXPECT_EQ(t.blockNumber, 20000000u);
    EXPECT_EQ(t.initiator, addr(1));
    EXPECT_EQ(t.entry.callee, addr(2));
    EXPECT_EQ(t.entry.selector->hex(), "0xa9059cbb");
    ASSERT_EQ(t.entry.children.size(), 3u);
    EXPECT_EQ(t.entry.children[0].type, CallType::StaticCall);
    EXPECT_EQ(t.entry.children[0].depth, 1u);
    EXPECT_TRUE(t.entry.children[1].logs.empty());  // reverted
    EXPECT_TRUE(t.entry.children[2].is_create());
    EXPECT_FALSE(t.entry.children[2].selector.has_value());
    ASSERT_EQ(t.entry.logs.size(), 1u);
    EXPECT_EQ(t.entry.logs[0].position, 1u);
    auto d = decode_transfers(t);
    ASSERT_EQ(d.transfers.size(), 1u);
    EXPECT_EQ(d.transfers[0].value, 100);
}

TEST(Rpc, FetchedTraceRoundTripsThroughFixture) {
    MockNode node;
    auto t = fetch_trace(node.url(), kTx, fast());
    auto path = std::filesystem::temp_directory_path() / "pricescope_rpc_roundtrip.json";
    save_trace(t, path);
    EXPECT_EQ(load_trace(path), t);
    std::filesystem::remove(path);
}

TEST(Rpc, UnknownTransactionIsTxNotFound) {
    MockNode node;
    node.knowsTx = false;
    EXPECT_THROW(fetch_trace(node.url(), kTx, fast()), TxNotFound);
    EXPECT_EQ(node.traces, 0);
}

TEST(Rpc, MissingTracerIsTracerUnsupported) {
    MockNode node;
    node.traceError = {{"code", -32601}, {"message", "the method debug_traceTransaction does not exist/is not available"}};
    EXPECT_THROW(fetch_trace(node.url(), kTx, fast()), TracerUnsupported);
}

TEST(Rpc, UnreachableEndpointIsNetworkError) {
    int port;
    {
        MockServer s;
        s.start();
        port = s.port;
    }
    EXPECT_THROW(fetch_trace("http://127.0.0.1:" + std::to_string(port) + "/", kTx, fast()), NetworkError);
}
