// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pricescope/transfers.hpp"

namespace pricescope {

// ---------------------------------------------------------------------------
// User-controlled accounts
// ---------------------------------------------------------------------------

struct UcOptions {
    //! Contracts never treated as user-controlled even when called directly by the initiator.
    std::set<Address> knownRouters;
};

//! Router list shipped in data/known_routers.json (Uniswap, PancakeSwap, 1inch, SushiSwap).
std::set<Address> builtin_known_routers();
//! JSON array of hex addresses, or an object with a "routers" array.
std::set<Address> load_address_list(const std::filesystem::path& path);

//! {initiator} plus contracts created by members (to a fixpoint) plus the entry callee when
//! it looks like the user's own contract. Adding the entry callee records a "UcHeuristic" warning.
UserControlledSet identify_user_controlled(const TransactionTrace& trace, const UcOptions& opts = {},
                                           std::vector<Warning>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Transfer graph
// ---------------------------------------------------------------------------

enum class NodeKind { Uc, Null, Account };

struct Node {
    NodeKind kind = NodeKind::Account;
    Address address;  // zero for Uc and Null

    static Node uc() { return {NodeKind::Uc, {}}; }
    static Node null() { return {NodeKind::Null, {}}; }
    static Node account(const Address& a) { return {NodeKind::Account, a}; }

    auto operator<=>(const Node&) const = default;
};

struct TGEdge {
    std::uint32_t timeIndex = 0;
    TransferAction transfer;
    Node from;
    Node to;
    //! Protocol contract the user called to cause this transfer, when known.
    std::optional<Address> invoked;

    bool operator==(const TGEdge&) const = default;
};

struct TransferGraph {
    std::size_t invocationIndex = 0;
    std::set<Node> nodes;
    std::vector<TGEdge> edges;  // sorted by timeIndex, 1..n
    UserControlledSet ucSet;

    [[nodiscard]] const TGEdge& edge(std::uint32_t timeIndex) const { return edges.at(timeIndex - 1); }
};

Node node_for(const Address& a, const UserControlledSet& uc);

TransferGraph build_graph(const UserInvocation& inv, const UserControlledSet& uc);

//! DOT rendering; nodes labeled by short address, edges "T{index}:{symbol}:{amount}".
std::string to_dot(const TransferGraph& g, const FixtureContext& ctx = {});

}  // namespace pricescope
