// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "pricescope/amm.hpp"
#include "support/builder.hpp"
#include "support/stableswap_oracle.hpp"

using namespace pricescope;
using namespace pricescope::testing;

namespace {

const Address X = addr(1), Y = addr(2);

CpmmPool cpmm(U256 x, U256 y, std::uint32_t fee = 0) { return {X, Y, x, y, fee}; }

StableswapPool stable(std::vector<U256> r, U256 amp, U256 prec = 1) {
    StableswapPool p;
    for (std::size_t i = 0; i < r.size(); ++i) p.tokens.push_back(addr(10 + i));
    p.reserves = std::move(r);
    p.amp = amp;
    p.ampPrecision = prec;
    return p;
}

// Oracle: post-swap y on the 2^-64 grid by bisection on the invariant with D held fixed.
BigInt bisect_y(const StableswapPool& p, std::size_t i, std::size_t j, const U256& dx, const Rational& D) {
    std::vector<Rational> x;
    for (const auto& r : p.reserves) x.emplace_back(BigInt(r));
    x[i] += Rational(BigInt(dx));
    Rational a(BigInt(p.amp), BigInt(p.ampPrecision));
    BigInt one = BigInt(1) << 64;
    // F decreases in x_j at fixed D; the solution is the largest y with F >= 0... find
    // the smallest grid y with F(y) <= 0 and step back when not exact.
    BigInt lo = 1, hi = BigInt(p.reserves[j]) * one;
    auto F = [&](const BigInt& m) -> Rational {
        auto xs = x;
        xs[j] = Rational(m, one);
        return -invariant_F(xs, a, D);  // Ann*S + D - Ann*D - D^(n+1)/(n^n P), increasing in y
    };
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        if (F(mid) <= 0) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

TEST(Cpmm, SpotPrice) {
    EXPECT_EQ(cpmm_spot_price(cpmm(100, 200)), Rational(2));
    EXPECT_EQ(cpmm_spot_price(cpmm(1, 1)), Rational(1));
    EXPECT_THROW(cpmm_spot_price(cpmm(0, 5)), ZeroReserve);
}

TEST(Cpmm, FeelessExamples) {
    auto a = cpmm_swap_exact_in(cpmm(100, 200), X, 100);
    EXPECT_EQ(a.amountOut, U256(100));
    EXPECT_EQ(a.pool.reserveX, U256(200));
    EXPECT_EQ(a.pool.reserveY, U256(100));
    auto b = cpmm_swap_exact_in(cpmm(10, 10), X, 10);
    EXPECT_EQ(b.amountOut, U256(5));
    EXPECT_EQ(b.pool.reserveX, U256(20));
    EXPECT_EQ(b.pool.reserveY, U256(5));
}

TEST(Cpmm, FeeExampleMatchesRationalFloor) {
    auto r = cpmm_swap_exact_in(cpmm(1000000, 1000000, 30), X, 1000);
    // Oracle: y * dx_fee / (x + dx_fee) with dx_fee = 1000 * 9970 / 10000, floored.
    Rational dx_fee = Rational(1000) * Rational(9970, 10000);
    Rational exact = Rational(1000000) * dx_fee / (Rational(1000000) + dx_fee);
    BigInt floor_v = numerator(exact) / denominator(exact);
    EXPECT_EQ(BigInt(r.amountOut), floor_v);
    EXPECT_EQ(r.amountOut, U256(996));
}

TEST(Cpmm, Errors) {
    EXPECT_THROW(cpmm_swap_exact_in(cpmm(0, 10), X, 1), ZeroReserve);
    EXPECT_THROW(cpmm_swap_exact_in(cpmm(1000000, 1), X, 1), InsufficientLiquidity);
    EXPECT_THROW(cpmm_swap_exact_in(cpmm(10, 10), addr(9), 1), InvalidArgument);
}

TEST(Cpmm, ProductMonotoneAndPriceDirection) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> big(1000, 1ull << 62);
    for (int i = 0; i < 1000; ++i) {
        std::uint32_t fee = (i % 2) ? 30 : 0;
        CpmmPool p = cpmm(big(rng), big(rng), fee);
        U256 in = big(rng) / 1000 + 1;
        bool x_in = i % 3 != 0;
        CpmmSwap s;
        try {
            s = cpmm_swap_exact_in(p, x_in ? X : Y, in);
        } catch (const InsufficientLiquidity&) {
            continue;
        }
        BigInt k0 = BigInt(p.reserveX) * BigInt(p.reserveY);
        BigInt k1 = BigInt(s.pool.reserveX) * BigInt(s.pool.reserveY);
        if (fee) {
            ASSERT_GT(k1, k0);
        } else {
            ASSERT_GE(k1, k0);
        }
        if (x_in) {
            ASSERT_LT(cpmm_spot_price(s.pool), cpmm_spot_price(p));
        } else {
            ASSERT_GT(cpmm_spot_price(s.pool), cpmm_spot_price(p));
        }
    }
}

TEST(Stableswap, BalancedPoolsSolveToSum) {
    for (std::size_t n : {2u, 3u, 4u}) {
        for (unsigned a : {1u, 10u, 100u, 5000u}) {
            auto p = stable(std::vector<U256>(n, U256(500)), a);
            auto D = stableswap_solve_D(p);
            EXPECT_EQ(D.value(), Rational(500 * static_cast<int>(n))) << n << " " << a;
            EXPECT_EQ(D.floor(), U256(500 * n));
        }
    }
    EXPECT_EQ(stableswap_solve_D(stable({1000, 1000}, 7)).value(), Rational(2000));
    EXPECT_EQ(stableswap_solve_D(stable({500, 500, 500}, 7)).value(), Rational(1500));
}

TEST(Stableswap, ImbalancedMatchesBisection) {
    auto p = stable({900, 1100}, 100);
    auto D = stableswap_solve_D(p);
    EXPECT_EQ(D.scaled, bisect_D(p));
    EXPECT_NEAR(to_double(D.value()), 1999.9497499968, 1e-9);
    EXPECT_LE(to_double(stableswap_residual(p, D.value())), 1e-10);
}

TEST(Stableswap, NewtonAgreesWithBisectionOnRandomPools) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick_n(2, 4);
    std::uniform_int_distribution<std::uint64_t> reserve(1, 1ull << 60);
    std::uniform_int_distribution<unsigned> amp(1, 5000);
    for (int i = 0; i < 500; ++i) {
        std::vector<U256> r(pick_n(rng));
        for (auto& v : r) v = reserve(rng);
        auto p = stable(r, amp(rng));
        auto D = stableswap_solve_D(p);
        BigInt oracle = bisect_D(p);
        BigInt diff = D.scaled > oracle ? BigInt(D.scaled - oracle) : BigInt(oracle - D.scaled);
        ASSERT_LE(diff, 1) << "pool " << i;
        ASSERT_LE(to_double(stableswap_residual(p, D.value())), 1e-10) << "pool " << i;
    }
}

TEST(Stableswap, SwapExampleMatchesBisection) {
    auto p = stable({1000, 1000}, 100);
    auto s = stableswap_swap(p, 0, 1, 100);
    BigInt oracle = bisect_y(p, 0, 1, 100, s.D.value());
    BigInt diff = s.yScaled > oracle ? BigInt(s.yScaled - oracle) : BigInt(oracle - s.yScaled);
    EXPECT_LE(diff, 1);
    Rational y(s.yScaled, BigInt(1) << 64);
    EXPECT_NEAR(to_double(Rational(1000) - y), 99.94977677, 1e-7);
    EXPECT_EQ(s.dy, U256(99));
    EXPECT_EQ(s.pool.reserves[0], U256(1100));
    EXPECT_EQ(s.pool.reserves[1], U256(901));
    // Residual on the exactly solved reserve, D held fixed.
    std::vector<Rational> post{Rational(1100), y};
    EXPECT_LE(to_double(stableswap_residual(post, Rational(100), s.D.value())), 1e-10);
}

TEST(Stableswap, FlatNearBalance) {
    U256 e18 = parse_u256("1000000000000000000");
    auto p = stable({e18 * 1000000, e18 * 1000000}, 1000);
    auto s = stableswap_swap(p, 0, 1, e18);
    double ratio = to_double(Rational(BigInt(s.dy), BigInt(e18)));
    EXPECT_GE(ratio, 0.999);
    EXPECT_LE(ratio, 1.0);
}

TEST(Stableswap, SmallAmpApproachesCpmm) {
    U256 e18 = parse_u256("1000000000000000000");
    U256 x0 = e18 * 1000000, x1 = e18 * 3000000, dx = e18 * 50000;
    auto s = stableswap_swap(stable({x0, x1}, 1, 1000000), 0, 1, dx);
    auto c = cpmm_swap_exact_in(cpmm(x0, x1, 0), X, dx);
    double rel = std::abs(to_double(Rational(BigInt(s.dy)) / Rational(BigInt(c.amountOut))) - 1.0);
    EXPECT_LT(rel, 0.01);
}

TEST(Stableswap, Errors) {
    EXPECT_THROW(stableswap_solve_D(stable({0, 10}, 10)), ZeroReserve);
    EXPECT_THROW(stableswap_solve_D(stable({10}, 10)), InvalidArgument);
    EXPECT_THROW(stableswap_swap(stable({10, 10}, 10), 0, 0, 1), InvalidArgument);
    EXPECT_THROW(stableswap_swap(stable({1000000, 1000000}, 10), 0, 1, 1), InsufficientLiquidity);
}

TEST(Stableswap, ProbePriceMatchesDerivativeDirection) {
    // Oracle: price of token 0 in token 1 is (Ann + K/x0) / (Ann + K/x1), K = D^(n+1)/(n^n P).
    auto deriv = [](const StableswapPool& p) -> Rational {
        Rational D = stableswap_solve_D(p).value();
        Rational x0(BigInt(p.reserves[0])), x1(BigInt(p.reserves[1]));
        Rational ann = Rational(BigInt(p.amp)) * 4;
        Rational K = D * D * D / (Rational(4) * x0 * x1);
        return (ann + K / x0) / (ann + K / x1);
    };
    U256 e18 = parse_u256("1000000000000000000");
    auto before = stable({e18 * 1000, e18 * 1000}, 100);
    auto after = stable({e18 * 1400, e18 * 620}, 100);
    bool probe_down = stableswap_probe_price(after, 0, 1) < stableswap_probe_price(before, 0, 1);
    bool deriv_down = deriv(after) < deriv(before);
    EXPECT_TRUE(deriv_down);
    EXPECT_EQ(probe_down, deriv_down);
}
