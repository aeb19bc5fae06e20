// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "pricescope/operations.hpp"
#include "support/router_walk.hpp"
#include "support/swap_oracle.hpp"

using namespace pricescope;
using namespace pricescope::testing;

namespace {

const Address kUc = addr(1);

TransferGraph graph_of(const std::vector<TransferAction>& ts, std::optional<Address> invoked = std::nullopt) {
    UserInvocation inv;
    std::uint32_t t = 0;
    for (const auto& a : ts) inv.transfers.push_back({++t, a, invoked});
    return build_graph(inv, UserControlledSet{{kUc}});
}

std::set<std::vector<std::uint32_t>> refs_of(const std::vector<DeFiOperation>& ops) {
    std::set<std::vector<std::uint32_t>> out;
    for (const auto& op : ops) out.insert(op.edgeRefs);
    return out;
}

}  // namespace

TEST(Graph, RouterWalkNodesAndIndices) {
    RouterWalk f;
    auto uc = identify_user_controlled(f.trace);
    auto g = build_graph(slice_user_invocations(f.trace, uc).at(0), uc);
    EXPECT_EQ(g.edges.size(), 7u);
    EXPECT_EQ(g.nodes.size(), 7u);  // UC + CA1..CA6
    EXPECT_FALSE(g.nodes.contains(Node::null()));
    EXPECT_EQ(g.edge(4).from, Node::account(f.ca[1]));
    EXPECT_EQ(g.edge(4).to, Node::account(f.ca[2]));
    for (const auto& e : g.edges) EXPECT_EQ(e.invoked, f.router);
}

TEST(Graph, EmptyInvocation) {
    auto g = graph_of({});
    EXPECT_EQ(g.nodes, std::set<Node>{Node::uc()});
    EXPECT_TRUE(g.edges.empty());
}

TEST(Graph, SingleMint) {
    auto g = graph_of({action(kZeroAddress, kUc, addr(100), 5)});
    EXPECT_EQ(g.nodes, (std::set<Node>{Node::uc(), Node::null()}));
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_EQ(g.edges[0].transfer.kind, TransferKind::Minting);
}

TEST(Graph, SelfTransferKeptAsLoop) {
    auto g = graph_of({action(addr(20), addr(20), addr(100), 5), action(kUc, addr(2), addr(100), 1)});
    EXPECT_EQ(g.edges[0].from, g.edges[0].to);
}

TEST(Graph, DotIsDeterministic) {
    RouterWalk f;
    f.trace.context.tokens[f.tokA] = {"AAA", 1};
    auto uc = identify_user_controlled(f.trace);
    auto g = build_graph(slice_user_invocations(f.trace, uc).at(0), uc);
    auto dot = to_dot(g, f.trace.context);
    EXPECT_EQ(dot, to_dot(g, f.trace.context));
    EXPECT_NE(dot.find("label=\"T1:AAA:10\""), std::string::npos);
    EXPECT_NE(dot.find("label=\"UC\""), std::string::npos);
}

TEST(Swaps, RouterWalkSingleSwap) {
    RouterWalk f;
    auto uc = identify_user_controlled(f.trace);
    auto g = build_graph(slice_user_invocations(f.trace, uc).at(0), uc);
    auto r = recover_swaps(g);
    ASSERT_EQ(r.swaps.size(), 1u);
    EXPECT_EQ(r.swaps[0].edgeRefs, (std::vector<std::uint32_t>{1, 4, 5, 7}));
    EXPECT_EQ(r.swaps[0].contracts, (std::vector<Address>{f.ca[1], f.ca[2], f.ca[3]}));
    ASSERT_EQ(r.pools.size(), 3u);
    EXPECT_EQ(r.swaps[0].tokenIn, f.tokA);
    EXPECT_EQ(r.swaps[0].tokenOut, f.tokD);
    auto all = recover_all(g);
    EXPECT_EQ(all.operations.size(), 1u);
}

TEST(Swaps, SingleOutflowIsNoSwap) {
    auto g = graph_of({action(kUc, addr(2), addr(100), 5)});
    EXPECT_TRUE(recover_swaps(g).swaps.empty());
}

TEST(Swaps, SameTokenRoundTripIsNoSwap) {
    auto g = graph_of({action(kUc, addr(2), addr(100), 5), action(addr(2), kUc, addr(100), 5)});
    EXPECT_TRUE(recover_swaps(g).swaps.empty());
}

TEST(Swaps, TwoDisjointCyclesMatchOracle) {
    auto g = graph_of({action(kUc, addr(2), addr(100), 5), action(addr(2), kUc, addr(101), 4),
                       action(kUc, addr(3), addr(102), 5), action(addr(3), kUc, addr(103), 4)});
    auto r = recover_swaps(g);
    EXPECT_EQ(r.swaps.size(), 2u);
    EXPECT_EQ(refs_of(r.swaps), brute_force_swaps(g));
}

TEST(Swaps, DecreasingTimeBreaksPath) {
    auto g = graph_of({action(addr(2), kUc, addr(101), 4), action(kUc, addr(2), addr(100), 5)});
    EXPECT_TRUE(recover_swaps(g).swaps.empty());
}

TEST(Swaps, RandomGraphsMatchOracle) {
    std::mt19937_64 rng(20240917);
    for (int i = 0; i < 300; ++i) {
        auto g = random_graph(rng);
        auto r = recover_swaps(g);
        ASSERT_EQ(refs_of(r.swaps), brute_force_swaps(g)) << "graph " << i;
        ASSERT_EQ(r.swaps.size(), refs_of(r.swaps).size());
        for (const auto& p : r.pools) EXPECT_NE(p.address, kUc);
    }
}

TEST(Swaps, BudgetIsEnforced) {
    // Complete layered graph between two accounts: exponentially many increasing paths.
    std::vector<TransferAction> ts{action(kUc, addr(2), addr(100), 1)};
    for (int i = 0; i < 40; ++i) ts.push_back(action(addr(2 + i % 2), addr(3 - i % 2), addr(101), 1));
    for (int i = 0; i < 40; ++i) ts.push_back(action(addr(2 + i % 2), addr(2 + i % 2), addr(101), 1));
    ts.push_back(action(addr(2), kUc, addr(102), 1));
    auto g = graph_of(ts);
    EXPECT_THROW(recover_swaps(g, {1000, std::nullopt}), SearchBudgetExceeded);
}

TEST(Deposits, TransferThenMint) {
    Address weth = addr(100), aweth = addr(101), pool = addr(20);
    auto g = graph_of({action(kUc, pool, weth, 5), action(kZeroAddress, kUc, aweth, 5)});
    auto d = recover_deposits(g);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].tokenIn, weth);
    EXPECT_EQ(d[0].tokenProof, aweth);
    EXPECT_EQ(d[0].contracts.front(), pool);
}

TEST(Deposits, MintBeforeTransferIsNone) {
    auto g = graph_of({action(kZeroAddress, kUc, addr(101), 5), action(kUc, addr(20), addr(100), 5)});
    EXPECT_TRUE(recover_deposits(g).empty());
}

TEST(Deposits, InterleavedPairsNearestFollowingMint) {
    // t1 in A, t2 in B, t3 mint pA, t4 mint pB.
    auto g = graph_of({action(kUc, addr(20), addr(100), 1), action(kUc, addr(21), addr(102), 1),
                       action(kZeroAddress, kUc, addr(101), 1), action(kZeroAddress, kUc, addr(103), 1)});
    auto d = recover_deposits(g);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].edgeRefs, (std::vector<std::uint32_t>{1, 3}));
    EXPECT_EQ(d[1].edgeRefs, (std::vector<std::uint32_t>{2, 4}));
    // Exhaustive: the only two disjoint valid pairings are {1-3,2-4} and {1-4,2-3}; greedy picks the first.
    int valid = 0;
    for (auto [a, b] : {std::pair{3, 4}, std::pair{4, 3}}) {
        bool ok = g.edge(1).transfer.token != g.edge(a).transfer.token &&
                  g.edge(2).transfer.token != g.edge(b).transfer.token && b > 2 && a > 1;
        valid += ok;
    }
    EXPECT_EQ(valid, 2);
}

TEST(Withdraws, BurnThenInflow) {
    auto g = graph_of({action(kUc, kZeroAddress, addr(101), 5), action(addr(20), kUc, addr(100), 5)});
    auto w = recover_withdraws(g);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0].tokenProof, addr(101));
    EXPECT_EQ(w[0].tokenOut, addr(100));
}

TEST(Withdraws, BurnWithoutInflowOrInflowFirst) {
    EXPECT_TRUE(recover_withdraws(graph_of({action(kUc, kZeroAddress, addr(101), 5)})).empty());
    EXPECT_TRUE(recover_withdraws(graph_of({action(addr(20), kUc, addr(100), 5),
                                            action(kUc, kZeroAddress, addr(101), 5)}))
                    .empty());
}

TEST(Borrows, InflowWithDebtMint) {
    auto g = graph_of({action(kZeroAddress, kUc, addr(105), 5), action(addr(20), kUc, addr(100), 5)});
    auto b = recover_borrows(g);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].tokenOut, addr(100));
    EXPECT_EQ(b[0].tokenDebt, addr(105));
}

TEST(Borrows, MintOnlyOrSameToken) {
    EXPECT_TRUE(recover_borrows(graph_of({action(kZeroAddress, kUc, addr(105), 5)})).empty());
    EXPECT_TRUE(recover_borrows(graph_of({action(kZeroAddress, kUc, addr(100), 5),
                                          action(addr(20), kUc, addr(100), 5)}))
                    .empty());
}

TEST(StakeClaim, Basic) {
    auto s = recover_stakes(graph_of({action(kUc, addr(20), addr(100), 5)}));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].tokenIn, addr(100));
    auto c = recover_claims(graph_of({action(addr(20), kUc, addr(100), 5)}));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].tokenOut, addr(100));
}

TEST(StakeClaim, CounterpartyMustBeInvokedContractWhenKnown) {
    EXPECT_TRUE(recover_stakes(graph_of({action(kUc, addr(20), addr(100), 5)}, addr(21))).empty());
    EXPECT_EQ(recover_stakes(graph_of({action(kUc, addr(20), addr(100), 5)}, addr(20))).size(), 1u);
}

TEST(RecoverAll, DepositIsNotAlsoStake) {
    auto g = graph_of({action(kUc, addr(20), addr(100), 5), action(kZeroAddress, kUc, addr(101), 5)});
    auto r = recover_all(g);
    ASSERT_EQ(r.operations.size(), 1u);
    EXPECT_EQ(r.operations[0].kind, OpKind::Deposit);
}

TEST(RecoverAll, EmptyGraph) { EXPECT_TRUE(recover_all(graph_of({})).operations.empty()); }

TEST(RecoverAll, SwapDepositBorrowInTimeOrder) {
    Address usdc = addr(100), weth = addr(101), aweth = addr(102), dai = addr(103), debt = addr(104);
    auto g = graph_of({action(kUc, addr(20), usdc, 10), action(addr(20), kUc, weth, 1),
                       action(kUc, addr(30), weth, 1), action(kZeroAddress, kUc, aweth, 1),
                       action(kZeroAddress, kUc, debt, 7), action(addr(31), kUc, dai, 7)});
    auto r = recover_all(g);
    ASSERT_EQ(r.operations.size(), 3u);
    EXPECT_EQ(r.operations[0].kind, OpKind::Swap);
    EXPECT_EQ(r.operations[1].kind, OpKind::Deposit);
    EXPECT_EQ(r.operations[2].kind, OpKind::Borrow);
    // No edge is shared across operations.
    std::set<std::uint32_t> seen;
    for (const auto& op : r.operations) {
        for (auto t : op.edgeRefs) EXPECT_TRUE(seen.insert(t).second);
        EXPECT_TRUE(std::is_sorted(op.edgeRefs.begin(), op.edgeRefs.end()));
    }
}

TEST(RecoverAll, InvariantsOnRandomGraphs) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        auto g = random_graph(rng);
        auto r = recover_all(g);
        std::set<std::uint32_t> non_swap;
        std::set<std::uint32_t> swap_edges;
        for (const auto& op : r.operations) {
            ASSERT_TRUE(std::adjacent_find(op.edgeRefs.begin(), op.edgeRefs.end(),
                                           [](auto a, auto b) { return a >= b; }) == op.edgeRefs.end());
            for (auto t : op.edgeRefs) {
                ASSERT_GE(t, 1u);
                ASSERT_LE(t, g.edges.size());
                if (op.kind == OpKind::Swap) {
                    swap_edges.insert(t);
                } else {
                    ASSERT_TRUE(non_swap.insert(t).second);
                }
            }
            if (op.kind == OpKind::Deposit || op.kind == OpKind::Borrow) {
                ASSERT_TRUE(std::any_of(op.edgeRefs.begin(), op.edgeRefs.end(), [&](auto t) {
                    return g.edge(t).transfer.kind == TransferKind::Minting;
                }));
            }
        }
        for (auto t : non_swap) ASSERT_FALSE(swap_edges.contains(t));
        ASSERT_TRUE(std::is_sorted(r.operations.begin(), r.operations.end(),
                                   [](const auto& a, const auto& b) { return a.span.first < b.span.first; }));
    }
}

TEST(Segments, MergesSameKindRunsAndFillsGaps) {
    // swap(1-2) swap(3-4) | stray edge 5 | deposit(6-7)
    auto g = graph_of({action(kUc, addr(20), addr(100), 1), action(addr(20), kUc, addr(101), 1),
                       action(kUc, addr(21), addr(100), 1), action(addr(21), kUc, addr(101), 1),
                       action(addr(40), addr(41), addr(100), 1), action(kUc, addr(30), addr(101), 1),
                       action(kZeroAddress, kUc, addr(102), 1)});
    auto r = recover_all(g);
    ASSERT_EQ(r.operations.size(), 3u);
    auto segs = build_segments({g}, r.operations);
    ASSERT_EQ(segs.size(), 3u);
    EXPECT_EQ(segs[0].span, (Span{1, 4}));
    EXPECT_EQ(segs[0].ops.size(), 2u);
    EXPECT_EQ(segs[1].span, (Span{5, 5}));
    EXPECT_TRUE(segs[1].ops.empty());
    EXPECT_EQ(segs[2].span, (Span{6, 7}));
}
