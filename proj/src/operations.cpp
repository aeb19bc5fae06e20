// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/operations.hpp"

#include <algorithm>
#include <map>

namespace pricescope {

std::string_view to_string(OpKind k) {
    switch (k) {
        case OpKind::Swap: return "Swap";
        case OpKind::Deposit: return "Deposit";
        case OpKind::Withdraw: return "Withdraw";
        case OpKind::Borrow: return "Borrow";
        case OpKind::Stake: return "Stake";
        case OpKind::Claim: return "Claim";
    }
    return "?";
}

namespace {

bool is_transferring(const TGEdge& e) { return e.transfer.kind == TransferKind::Transferring; }
bool uc_out(const TGEdge& e) { return is_transferring(e) && e.from.kind == NodeKind::Uc && e.to.kind == NodeKind::Account; }
bool uc_in(const TGEdge& e) { return is_transferring(e) && e.from.kind == NodeKind::Account && e.to.kind == NodeKind::Uc; }
bool mint_to_uc(const TGEdge& e) { return e.transfer.kind == TransferKind::Minting && e.to.kind == NodeKind::Uc; }
bool burn_from_uc(const TGEdge& e) { return e.transfer.kind == TransferKind::Burning && e.from.kind == NodeKind::Uc; }

// The counterparty plus the contract the user actually called, when that differs.
std::vector<Address> protocol_contracts(const TGEdge& e, const Address& counterparty) {
    std::vector<Address> out{counterparty};
    if (e.invoked && *e.invoked != counterparty) out.push_back(*e.invoked);
    return out;
}

DeFiOperation make_op(const TransferGraph& g, OpKind kind, std::vector<std::uint32_t> refs) {
    std::sort(refs.begin(), refs.end());
    DeFiOperation op;
    op.kind = kind;
    op.edgeRefs = std::move(refs);
    op.span = {op.edgeRefs.front(), op.edgeRefs.back()};
    op.invocation = g.invocationIndex;
    return op;
}

class SwapSearch {
  public:
    SwapSearch(const TransferGraph& g, const SearchLimits& limits) : g_(g), limits_(limits) {
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const TGEdge& e = g.edges[i];
            if (!is_transferring(e) || e.from.kind != NodeKind::Account) continue;
            out_[e.from.address].push_back(i);
        }
    }

    SwapResult run() {
        for (std::size_t i = 0; i < g_.edges.size(); ++i) {
            if (!uc_out(g_.edges[i])) continue;
            path_.assign(1, i);
            tick();
            extend(g_.edges[i].to.address, g_.edges[i].timeIndex);
        }
        return std::move(result_);
    }

  private:
    void tick() {
        if (++visited_ > limits_.maxPaths) {
            throw SearchBudgetExceeded("swap search visited more than " + std::to_string(limits_.maxPaths) + " paths");
        }
        if (limits_.deadline && (visited_ & 0xfff) == 0 && std::chrono::steady_clock::now() > *limits_.deadline) {
            throw Timeout("swap search passed its deadline");
        }
    }

    void extend(const Address& at, std::uint32_t after) {
        auto it = out_.find(at);
        if (it == out_.end()) return;
        for (std::size_t idx : it->second) {
            const TGEdge& e = g_.edges[idx];
            if (e.timeIndex <= after) continue;
            tick();
            path_.push_back(idx);
            if (e.to.kind == NodeKind::Uc) {
                if (g_.edges[path_.front()].transfer.token != e.transfer.token) record();
            } else if (e.to.kind == NodeKind::Account) {
                extend(e.to.address, e.timeIndex);
            }
            path_.pop_back();
        }
    }

    void record() {
        std::vector<std::uint32_t> refs;
        DeFiOperation op;
        op.kind = OpKind::Swap;
        for (std::size_t k = 0; k < path_.size(); ++k) {
            const TGEdge& e = g_.edges[path_[k]];
            refs.push_back(e.timeIndex);
            if (k > 0) {
                const Address& pool = e.from.address;
                if (std::find(op.contracts.begin(), op.contracts.end(), pool) == op.contracts.end()) {
                    op.contracts.push_back(pool);
                }
                if (std::none_of(result_.pools.begin(), result_.pools.end(),
                                 [&](const PoolLabel& p) { return p.address == pool; })) {
                    result_.pools.push_back({pool, OpKind::Swap});
                }
            }
        }
        op.tokenIn = g_.edges[path_.front()].transfer.token;
        op.tokenOut = g_.edges[path_.back()].transfer.token;
        op.edgeRefs = refs;
        op.span = {refs.front(), refs.back()};
        op.invocation = g_.invocationIndex;
        result_.swaps.push_back(std::move(op));
    }

    const TransferGraph& g_;
    const SearchLimits& limits_;
    std::map<Address, std::vector<std::size_t>> out_;
    std::vector<std::size_t> path_;
    std::size_t visited_ = 0;
    SwapResult result_;
};

}  // namespace

SwapResult recover_swaps(const TransferGraph& g, const SearchLimits& limits) {
    return SwapSearch(g, limits).run();
}

std::vector<DeFiOperation> recover_deposits(const TransferGraph& g, EdgeSet* consumed) {
    EdgeSet local;
    EdgeSet& used = consumed ? *consumed : local;
    std::vector<DeFiOperation> out;
    for (const auto& e : g.edges) {
        if (!uc_out(e) || used.contains(e.timeIndex)) continue;
        for (const auto& m : g.edges) {
            if (m.timeIndex <= e.timeIndex || !mint_to_uc(m) || used.contains(m.timeIndex)) continue;
            if (m.transfer.token == e.transfer.token) continue;
            auto op = make_op(g, OpKind::Deposit, {e.timeIndex, m.timeIndex});
            op.tokenIn = e.transfer.token;
            op.tokenProof = m.transfer.token;
            op.contracts = protocol_contracts(e, e.to.address);
            used.insert(e.timeIndex);
            used.insert(m.timeIndex);
            out.push_back(std::move(op));
            break;
        }
    }
    return out;
}

std::vector<DeFiOperation> recover_withdraws(const TransferGraph& g, EdgeSet* consumed) {
    EdgeSet local;
    EdgeSet& used = consumed ? *consumed : local;
    std::vector<DeFiOperation> out;
    for (const auto& b : g.edges) {
        if (!burn_from_uc(b) || used.contains(b.timeIndex)) continue;
        for (const auto& e : g.edges) {
            if (e.timeIndex <= b.timeIndex || !uc_in(e) || used.contains(e.timeIndex)) continue;
            if (e.transfer.token == b.transfer.token) continue;
            auto op = make_op(g, OpKind::Withdraw, {b.timeIndex, e.timeIndex});
            op.tokenProof = b.transfer.token;
            op.tokenOut = e.transfer.token;
            op.contracts = protocol_contracts(e, e.from.address);
            used.insert(b.timeIndex);
            used.insert(e.timeIndex);
            out.push_back(std::move(op));
            break;
        }
    }
    return out;
}

std::vector<DeFiOperation> recover_borrows(const TransferGraph& g, EdgeSet* consumed) {
    EdgeSet local;
    EdgeSet& used = consumed ? *consumed : local;
    std::vector<DeFiOperation> out;
    for (const auto& m : g.edges) {
        if (!mint_to_uc(m) || used.contains(m.timeIndex)) continue;
        const TGEdge* best = nullptr;
        std::uint32_t best_dist = 0;
        for (const auto& e : g.edges) {
            if (!uc_in(e) || used.contains(e.timeIndex) || e.transfer.token == m.transfer.token) continue;
            std::uint32_t d = e.timeIndex > m.timeIndex ? e.timeIndex - m.timeIndex : m.timeIndex - e.timeIndex;
            if (!best || d < best_dist) {  // edges are time-sorted, so ties keep the earlier one
                best = &e;
                best_dist = d;
            }
        }
        if (!best) continue;
        auto op = make_op(g, OpKind::Borrow, {m.timeIndex, best->timeIndex});
        op.tokenOut = best->transfer.token;
        op.tokenDebt = m.transfer.token;
        op.contracts = protocol_contracts(*best, best->from.address);
        used.insert(m.timeIndex);
        used.insert(best->timeIndex);
        out.push_back(std::move(op));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.span.first < b.span.first; });
    return out;
}

std::vector<DeFiOperation> recover_stakes(const TransferGraph& g, EdgeSet* consumed) {
    EdgeSet local;
    EdgeSet& used = consumed ? *consumed : local;
    std::vector<DeFiOperation> out;
    for (const auto& e : g.edges) {
        if (!uc_out(e) || used.contains(e.timeIndex)) continue;
        if (e.invoked && e.to.address != *e.invoked) continue;
        bool minted_later = std::any_of(g.edges.begin(), g.edges.end(), [&](const TGEdge& m) {
            return m.timeIndex > e.timeIndex && mint_to_uc(m);
        });
        if (minted_later) continue;
        auto op = make_op(g, OpKind::Stake, {e.timeIndex});
        op.tokenIn = e.transfer.token;
        op.contracts = protocol_contracts(e, e.to.address);
        used.insert(e.timeIndex);
        out.push_back(std::move(op));
    }
    return out;
}

std::vector<DeFiOperation> recover_claims(const TransferGraph& g, EdgeSet* consumed) {
    EdgeSet local;
    EdgeSet& used = consumed ? *consumed : local;
    std::vector<DeFiOperation> out;
    for (const auto& e : g.edges) {
        if (!uc_in(e) || used.contains(e.timeIndex)) continue;
        if (e.invoked && e.from.address != *e.invoked) continue;
        bool burned_before = std::any_of(g.edges.begin(), g.edges.end(), [&](const TGEdge& b) {
            return b.timeIndex < e.timeIndex && burn_from_uc(b);
        });
        if (burned_before) continue;
        auto op = make_op(g, OpKind::Claim, {e.timeIndex});
        op.tokenOut = e.transfer.token;
        op.contracts = protocol_contracts(e, e.from.address);
        used.insert(e.timeIndex);
        out.push_back(std::move(op));
    }
    return out;
}

RecoveryResult recover_all(const TransferGraph& g, const SearchLimits& limits) {
    RecoveryResult r;
    SwapResult swaps = recover_swaps(g, limits);
    EdgeSet consumed;
    for (const auto& s : swaps.swaps) consumed.insert(s.edgeRefs.begin(), s.edgeRefs.end());
    r.operations = std::move(swaps.swaps);
    r.pools = std::move(swaps.pools);

    auto append = [&](std::vector<DeFiOperation> ops) {
        for (auto& op : ops) r.operations.push_back(std::move(op));
    };
    append(recover_deposits(g, &consumed));
    append(recover_withdraws(g, &consumed));
    append(recover_borrows(g, &consumed));
    append(recover_stakes(g, &consumed));
    append(recover_claims(g, &consumed));

    std::stable_sort(r.operations.begin(), r.operations.end(), [](const auto& a, const auto& b) {
        if (a.span.first != b.span.first) return a.span.first < b.span.first;
        return a.span.last < b.span.last;
    });
    return r;
}

std::vector<Segment> build_segments(const std::vector<TransferGraph>& graphs, const std::vector<DeFiOperation>& ops) {
    std::vector<Segment> out;
    for (const auto& g : graphs) {
        std::vector<std::size_t> mine;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (ops[i].invocation == g.invocationIndex) mine.push_back(i);
        }
        std::sort(mine.begin(), mine.end(), [&](std::size_t a, std::size_t b) {
            return ops[a].span.first < ops[b].span.first;
        });

        std::vector<Segment> blocks;
        for (std::size_t i : mine) {
            if (!blocks.empty() && ops[i].span.first <= blocks.back().span.last) {
                blocks.back().span.last = std::max(blocks.back().span.last, ops[i].span.last);
                blocks.back().ops.push_back(i);
            } else {
                blocks.push_back({g.invocationIndex, ops[i].span, {i}});
            }
        }

        // Runs of same-kind operations with no edge between them act as one step.
        auto single_kind = [&](const Segment& s) {
            return std::all_of(s.ops.begin(), s.ops.end(),
                               [&](std::size_t i) { return ops[i].kind == ops[s.ops.front()].kind; });
        };
        std::vector<Segment> merged;
        for (auto& b : blocks) {
            if (!merged.empty() && merged.back().span.last + 1 == b.span.first && single_kind(merged.back()) &&
                single_kind(b) && ops[merged.back().ops.front()].kind == ops[b.ops.front()].kind) {
                merged.back().span.last = b.span.last;
                merged.back().ops.insert(merged.back().ops.end(), b.ops.begin(), b.ops.end());
            } else {
                merged.push_back(std::move(b));
            }
        }

        std::uint32_t next = 1;
        const auto n = static_cast<std::uint32_t>(g.edges.size());
        for (auto& b : merged) {
            if (b.span.first > next) out.push_back({g.invocationIndex, {next, b.span.first - 1}, {}});
            next = b.span.last + 1;
            out.push_back(std::move(b));
        }
        if (next <= n) out.push_back({g.invocationIndex, {next, n}, {}});
    }
    return out;
}

nlohmann::json to_json(const DeFiOperation& op) {
    nlohmann::json tokens = nlohmann::json::object();
    if (op.tokenIn) tokens["in"] = op.tokenIn->hex();
    if (op.tokenOut) tokens["out"] = op.tokenOut->hex();
    if (op.tokenProof) tokens["proof"] = op.tokenProof->hex();
    if (op.tokenDebt) tokens["debt"] = op.tokenDebt->hex();
    nlohmann::json contracts = nlohmann::json::array();
    for (const auto& c : op.contracts) contracts.push_back(c.hex());
    return {{"kind", std::string(to_string(op.kind))},
            {"tokens", tokens},
            {"contracts", contracts},
            {"timeSpan", {op.span.first, op.span.last}},
            {"edges", op.edgeRefs},
            {"invocation", op.invocation}};
}

}  // namespace pricescope
