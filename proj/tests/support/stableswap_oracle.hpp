// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// Rational evaluation of the stableswap invariant and a bisection solver for D.

#pragma once

#include <vector>

#include "pricescope/amm.hpp"

namespace pricescope::testing {

// Oracle: F(D) = Ann*D + D^(n+1)/(n^n P) - Ann*S - D evaluated in plain rationals.
inline Rational invariant_F(const std::vector<Rational>& x, const Rational& a, const Rational& D) {
    Rational S = 0, P = 1, nn = 1;
    for (const auto& v : x) {
        S += v;
        P *= v;
        nn *= static_cast<unsigned>(x.size());
    }
    Rational ann = a * nn, Dp = D;
    for (std::size_t i = 0; i < x.size(); ++i) Dp *= D;
    return ann * D + Dp / (nn * P) - ann * S - D;
}

// Oracle: largest m with F(m / 2^64) <= 0 by bisection on [0, S * 2^64].
inline BigInt bisect_D(const StableswapPool& p) {
    std::vector<Rational> x;
    BigInt S = 0;
    for (const auto& r : p.reserves) {
        x.emplace_back(BigInt(r));
        S += BigInt(r);
    }
    Rational a(BigInt(p.amp), BigInt(p.ampPrecision));
    BigInt one = BigInt(1) << 64;
    BigInt lo = 0, hi = S * one;
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        if (invariant_F(x, a, Rational(mid, one)) <= 0) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

}  // namespace pricescope::testing
