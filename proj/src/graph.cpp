// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/graph.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "pricescope/keccak.hpp"
#include "pricescope/routers_data.hpp"

namespace pricescope {

namespace {

std::set<Address> parse_address_list(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    const nlohmann::json& arr = j.is_object() ? j.at("routers") : j;
    if (!arr.is_array()) throw ParseError(origin + ": expected an address array");
    std::set<Address> out;
    for (const auto& a : arr) out.insert(Address::from_hex(a.get<std::string>()));
    return out;
}

}  // namespace

std::set<Address> builtin_known_routers() {
    static const std::set<Address> routers = parse_address_list(embedded::kKnownRouters, "data/known_routers.json");
    return routers;
}

std::set<Address> load_address_list(const std::filesystem::path& path) {
    return parse_address_list(read_file(path), path.string());
}

namespace {

bool is_token_call(const CallFrame& f) {
    static const std::set<Selector> kTokenSelectors = {
        function_selector("transfer(address,uint256)"),
        function_selector("transferFrom(address,address,uint256)"),
        function_selector("approve(address,uint256)"),
        function_selector("deposit()"),
        function_selector("withdraw(uint256)"),
    };
    return f.selector && kTokenSelectors.contains(*f.selector);
}

// Token contracts and configured pools/oracles are protocol code, not the user's.
bool looks_like_protocol(const TransactionTrace& trace, const Address& a) {
    bool token = false;
    for_each_frame(trace.entry, [&](const CallFrame& f) {
        for (const auto& l : f.logs) {
            if (l.address == a && !l.topics.empty() && l.topics.front() == transfer_topic()) token = true;
        }
    });
    if (token) return true;
    for (const auto& p : trace.context.pools) {
        if (p.address == a) return true;
    }
    for (const auto& o : trace.context.oracles) {
        if (o.contract == a) return true;
    }
    return false;
}

}  // namespace

UserControlledSet identify_user_controlled(const TransactionTrace& trace, const UcOptions& opts,
                                           std::vector<Warning>* warnings) {
    UserControlledSet uc;
    uc.accounts.insert(trace.initiator);

    const CallFrame& e = trace.entry;
    if (e.caller == trace.initiator && !e.is_create() && !e.callee.is_zero() && !is_null_account(e.callee) &&
        account_kind(trace, e.callee) == AccountKind::Contract) {
        std::set<Address> routers = opts.knownRouters.empty() ? builtin_known_routers() : opts.knownRouters;
        if (!routers.contains(e.callee) && !is_token_call(e) && !looks_like_protocol(trace, e.callee)) {
            uc.accounts.insert(e.callee);
            if (warnings) {
                warnings->push_back({"UcHeuristic", "entry callee " + e.callee.hex() +
                                                        " treated as user-controlled"});
            }
        }
    }

    // Contracts created by members, to a fixpoint (a created contract may create more).
    for (bool grew = true; grew;) {
        grew = false;
        for_each_frame(trace.entry, [&](const CallFrame& f) {
            if (f.is_create() && uc.contains(f.caller) && !uc.contains(f.callee)) {
                uc.accounts.insert(f.callee);
                grew = true;
            }
        });
    }
    return uc;
}

Node node_for(const Address& a, const UserControlledSet& uc) {
    if (uc.contains(a)) return Node::uc();
    if (is_null_account(a)) return Node::null();
    return Node::account(a);
}

TransferGraph build_graph(const UserInvocation& inv, const UserControlledSet& uc) {
    TransferGraph g;
    g.invocationIndex = inv.index;
    g.ucSet = uc;
    g.nodes.insert(Node::uc());
    g.edges.reserve(inv.transfers.size());
    for (const auto& t : inv.transfers) {
        TGEdge e{t.timeIndex, t.action, node_for(t.action.sender, uc), node_for(t.action.receiver, uc), t.invoked};
        g.nodes.insert(e.from);
        g.nodes.insert(e.to);
        g.edges.push_back(std::move(e));
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const TGEdge& a, const TGEdge& b) { return a.timeIndex < b.timeIndex; });
    return g;
}

namespace {

std::string node_label(const Node& n) {
    switch (n.kind) {
        case NodeKind::Uc: return "UC";
        case NodeKind::Null: return "Null";
        case NodeKind::Account: return n.address.short_hex();
    }
    return "?";
}

std::string node_id(const Node& n) {
    switch (n.kind) {
        case NodeKind::Uc: return "uc";
        case NodeKind::Null: return "null";
        case NodeKind::Account: return "a" + n.address.hex().substr(2);
    }
    return "?";
}

}  // namespace

std::string to_dot(const TransferGraph& g, const FixtureContext& ctx) {
    std::ostringstream out;
    out << "digraph tg" << g.invocationIndex << " {\n";
    for (const auto& n : g.nodes) {
        out << "  " << node_id(n) << " [label=\"" << node_label(n) << "\"";
        if (n.kind == NodeKind::Uc) out << ", shape=box";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        std::string amount = to_string(e.transfer.value);
        auto it = ctx.tokens.find(e.transfer.token);
        if (it != ctx.tokens.end() && it->second.decimals) {
            amount = scale_decimal(BigInt(e.transfer.value), *it->second.decimals);
        }
        out << "  " << node_id(e.from) << " -> " << node_id(e.to) << " [label=\"T" << e.timeIndex << ":"
            << ctx.token_name(e.transfer.token) << ":" << amount << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace pricescope
