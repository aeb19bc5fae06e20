// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reading of the eight pattern templates, used to cross-check match_patterns.

#pragma once

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "pricescope/patterns.hpp"

namespace pricescope::testing::pattern_oracle {

using Triple = std::tuple<int, std::size_t, std::size_t, std::size_t>;  // pattern, op a, op b, verdict

// Positions compare by invocation first, then by time inside the invocation.
inline bool earlier(std::size_t invA, std::uint32_t lastA, std::size_t invB, std::uint32_t firstB) {
    return invA != invB ? invA < invB : lastA < firstB;
}
inline bool pos_before(const DeFiOperation& o, const PriceChangeVerdict& v) {
    return earlier(o.invocation, o.span.last, v.anchor.invocation, v.anchor.span.first);
}
inline bool pos_before(const PriceChangeVerdict& v, const DeFiOperation& o) {
    return earlier(v.anchor.invocation, v.anchor.span.last, o.invocation, o.span.first);
}
inline bool in(const std::vector<Address>& cs, const Address& c) { return std::find(cs.begin(), cs.end(), c) != cs.end(); }

// Templates read literally: exists tokens x, y, z and contracts such that every step holds.
inline std::set<Triple> enumerate(const std::vector<DeFiOperation>& ops, const std::vector<PriceChangeVerdict>& vs,
                           const std::vector<Address>& tokens, int minConfidence) {
    std::set<Triple> out;
    auto eq = [](const std::optional<Address>& o, const Address& a) { return o && *o == a; };
    for (std::size_t ia = 0; ia < ops.size(); ++ia) {
        for (std::size_t ib = 0; ib < ops.size(); ++ib) {
            const auto& a = ops[ia];
            const auto& b = ops[ib];
            if (!earlier(a.invocation, a.span.last, b.invocation, b.span.first)) continue;
            for (std::size_t iv = 0; iv < vs.size(); ++iv) {
                const auto& v = vs[iv];
                if (v.confidence < minConfidence) continue;
                bool mid = pos_before(a, v) && pos_before(v, b);
                bool pre = pos_before(v, a);
                auto up = [&](const Address& t, const std::vector<Address>& cs) {
                    return v.direction == Direction::Increase && v.token == t && in(cs, v.contract);
                };
                auto down = [&](const Address& t, const std::vector<Address>& cs) {
                    return v.direction == Direction::Decrease && v.token == t && in(cs, v.contract);
                };
                for (const auto& x : tokens) {
                    for (const auto& y : tokens) {
                        for (const auto& z : tokens) {
                            bool swaps = a.kind == OpKind::Swap && b.kind == OpKind::Swap && eq(a.tokenIn, x) &&
                                         eq(a.tokenOut, y) && eq(b.tokenIn, y) && eq(b.tokenOut, z);
                            if (swaps && mid && (up(y, b.contracts) || down(z, b.contracts))) out.insert({1, ia, ib, iv});
                            if (swaps && pre &&
                                (up(x, a.contracts) || down(y, a.contracts) || up(y, b.contracts) || down(z, b.contracts))) {
                                out.insert({2, ia, ib, iv});
                            }
                            bool db = a.kind == OpKind::Deposit && b.kind == OpKind::Borrow && eq(a.tokenIn, x) &&
                                      eq(a.tokenProof, y) && eq(b.tokenOut, z);
                            bool dbOk = up(x, b.contracts) || down(z, b.contracts);
                            if (db && mid && dbOk) out.insert({3, ia, ib, iv});
                            if (db && pre && dbOk) out.insert({4, ia, ib, iv});
                            bool sc = a.kind == OpKind::Stake && b.kind == OpKind::Claim && eq(a.tokenIn, x) &&
                                      eq(b.tokenOut, y);
                            if (sc && mid && down(y, b.contracts)) out.insert({5, ia, ib, iv});
                            if (sc && pre && (up(x, a.contracts) || down(y, b.contracts))) out.insert({6, ia, ib, iv});
                            bool dw = a.kind == OpKind::Deposit && b.kind == OpKind::Withdraw && eq(a.tokenIn, x) &&
                                      eq(a.tokenProof, y) && eq(b.tokenProof, y) && eq(b.tokenOut, z);
                            if (dw && mid && (up(y, b.contracts) || down(z, b.contracts))) out.insert({7, ia, ib, iv});
                            if (dw && pre &&
                                (up(x, a.contracts) || down(y, a.contracts) || up(y, b.contracts) || down(z, b.contracts))) {
                                out.insert({8, ia, ib, iv});
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

inline std::set<Triple> flatten(const std::vector<AttackFinding>& fs) {
    std::set<Triple> out;
    for (const auto& f : fs) {
        for (auto v : f.verdicts) out.insert({static_cast<int>(f.pattern), f.operations[0], f.operations[1], v});
    }
    return out;
}


//! Every token any operation mentions.
inline std::vector<Address> tokens_of(const std::vector<DeFiOperation>& ops) {
    std::set<Address> s;
    for (const auto& op : ops) {
        for (const auto& t : {op.tokenIn, op.tokenOut, op.tokenProof, op.tokenDebt}) {
            if (t) s.insert(*t);
        }
    }
    return {s.begin(), s.end()};
}

}  // namespace pricescope::testing::pattern_oracle
