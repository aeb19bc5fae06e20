// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricescope/graph.hpp"

namespace pricescope {

enum class OpKind { Swap, Deposit, Withdraw, Borrow, Stake, Claim };

std::string_view to_string(OpKind k);

//! Inclusive range of time indices.
struct Span {
    std::uint32_t first = 0;
    std::uint32_t last = 0;

    bool operator==(const Span&) const = default;
};

struct DeFiOperation {
    OpKind kind = OpKind::Swap;
    std::optional<Address> tokenIn;     // Swap input, Deposit/Stake asset
    std::optional<Address> tokenOut;    // Swap output, Withdraw/Borrow/Claim asset
    std::optional<Address> tokenProof;  // minted by Deposit, burned by Withdraw
    std::optional<Address> tokenDebt;   // minted by Borrow
    std::vector<Address> contracts;     // pools for Swap, protocol contracts otherwise
    std::vector<std::uint32_t> edgeRefs;
    Span span;
    std::size_t invocation = 0;

    bool operator==(const DeFiOperation&) const = default;
};

struct PoolLabel {
    Address address;
    OpKind labeledBy = OpKind::Swap;

    bool operator==(const PoolLabel&) const = default;
};

struct SearchLimits {
    std::size_t maxPaths = 1'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

//! Edges already claimed by higher-precedence operations.
using EdgeSet = std::set<std::uint32_t>;

struct SwapResult {
    std::vector<DeFiOperation> swaps;
    std::vector<PoolLabel> pools;
};

//! Every UC -> ... -> UC path of Transferring edges with strictly increasing time whose
//! first and last tokens differ. Throws SearchBudgetExceeded past limits.maxPaths extended
//! paths, Timeout past limits.deadline.
SwapResult recover_swaps(const TransferGraph& g, const SearchLimits& limits = {});

std::vector<DeFiOperation> recover_deposits(const TransferGraph& g, EdgeSet* consumed = nullptr);
std::vector<DeFiOperation> recover_withdraws(const TransferGraph& g, EdgeSet* consumed = nullptr);
std::vector<DeFiOperation> recover_borrows(const TransferGraph& g, EdgeSet* consumed = nullptr);
std::vector<DeFiOperation> recover_stakes(const TransferGraph& g, EdgeSet* consumed = nullptr);
std::vector<DeFiOperation> recover_claims(const TransferGraph& g, EdgeSet* consumed = nullptr);

struct RecoveryResult {
    std::vector<DeFiOperation> operations;  // sorted by span.first
    std::vector<PoolLabel> pools;
};

//! Swap > Deposit/Withdraw/Borrow > Stake/Claim; a consumed edge cannot witness a
//! lower-precedence operation.
RecoveryResult recover_all(const TransferGraph& g, const SearchLimits& limits = {});

// ---------------------------------------------------------------------------
// Time segments
// ---------------------------------------------------------------------------

//! A contiguous edge range of one invocation: one or more operations (ops non-empty) or a
//! run of edges no operation covers.
struct Segment {
    std::size_t invocation = 0;
    Span span;
    std::vector<std::size_t> ops;  // indices into the operation list passed to build_segments
};

//! Overlapping operations share a segment; back-to-back operations of the same kind are
//! merged too. Result is in global time order.
std::vector<Segment> build_segments(const std::vector<TransferGraph>& graphs,
                                    const std::vector<DeFiOperation>& ops);

//! Strict "happens before" on (invocation, span).
inline bool before(std::size_t invA, const Span& a, std::size_t invB, const Span& b) {
    return invA < invB || (invA == invB && a.last < b.first);
}

nlohmann::json to_json(const DeFiOperation& op);

}  // namespace pricescope
