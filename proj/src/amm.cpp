// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/amm.hpp"

namespace pricescope {

Rational cpmm_spot_price(const CpmmPool& pool) {
    if (pool.reserveX == 0) throw ZeroReserve("cpmm pool has zero reserve of tokenX");
    return Rational(BigInt(pool.reserveY), BigInt(pool.reserveX));
}

CpmmSwap cpmm_swap_exact_in(const CpmmPool& pool, const Address& tokenIn, const U256& amountIn) {
    if (amountIn == 0) throw InvalidArgument("swap amount must be positive");
    if (pool.feeBps > 10000) throw InvalidArgument("feeBps above 10000");
    bool x_in;
    if (tokenIn == pool.tokenX) {
        x_in = true;
    } else if (tokenIn == pool.tokenY) {
        x_in = false;
    } else {
        throw InvalidArgument("token " + tokenIn.hex() + " is not in the pool");
    }
    if (pool.reserveX == 0 || pool.reserveY == 0) throw ZeroReserve("cpmm pool has a zero reserve");

    BigInt rin(x_in ? pool.reserveX : pool.reserveY);
    BigInt rout(x_in ? pool.reserveY : pool.reserveX);
    BigInt in_with_fee = BigInt(amountIn) * (10000 - pool.feeBps);
    BigInt out = rout * in_with_fee / (rin * 10000 + in_with_fee);
    if (out == 0) throw InsufficientLiquidity("swap output rounds to zero");

    CpmmSwap r;
    r.amountOut = to_u256(out);
    r.pool = pool;
    U256 new_in = to_u256(rin + BigInt(amountIn));
    U256 new_out = to_u256(rout - out);
    if (x_in) {
        r.pool.reserveX = new_in;
        r.pool.reserveY = new_out;
    } else {
        r.pool.reserveY = new_in;
        r.pool.reserveX = new_out;
    }
    return r;
}

namespace {

constexpr unsigned K = kStableFracBits;

struct Params {
    std::size_t n;
    BigInt nn;       // n^n
    BigInt annNum;   // amp * n^n
    BigInt ampDen;   // ampPrecision
};

Params params_of(const StableswapPool& pool) {
    std::size_t n = pool.reserves.size();
    if (n < 2) throw InvalidArgument("stableswap pool needs at least two tokens");
    if (pool.amp == 0 || pool.ampPrecision == 0) throw InvalidArgument("stableswap amp must be positive");
    for (const auto& r : pool.reserves) {
        if (r == 0) throw ZeroReserve("stableswap pool has a zero reserve");
    }
    Params p{n, 1, 0, BigInt(pool.ampPrecision)};
    for (std::size_t i = 0; i < n; ++i) p.nn *= n;
    p.annNum = BigInt(pool.amp) * p.nn;
    return p;
}

// Sign of F(m / 2^K) scaled by the positive factor 2^(K(n+1)) * n^n * P * ampDen.
int sign_F(const Params& p, const BigInt& m, const BigInt& S, const BigInt& P) {
    const std::size_t n = p.n;
    BigInt m_pow = 1;
    for (std::size_t i = 0; i <= n; ++i) m_pow *= m;
    BigInt nnP = p.nn * P;
    BigInt two_kn = BigInt(1) << (K * n);
    BigInt g = p.annNum * nnP * m * two_kn + p.ampDen * m_pow - p.annNum * S * nnP * (two_kn << K) -
               p.ampDen * m * nnP * two_kn;
    return g.sign();
}

BigInt bisect_D(const Params& p, const BigInt& S, const BigInt& P) {
    BigInt lo = 0, hi = S << K;  // root <= S by AM-GM
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) >> 1;
        if (sign_F(p, mid, S, P) <= 0) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

}  // namespace

StableD stableswap_solve_D(const StableswapPool& pool) {
    Params p = params_of(pool);
    BigInt S = 0, P = 1;
    for (const auto& r : pool.reserves) {
        S += BigInt(r);
        P *= BigInt(r);
    }

    // Curve's iteration on the grid: D_P = D^(n+1) / (n^n P), all values scaled by 2^K.
    const BigInt n(static_cast<unsigned>(p.n));
    BigInt D = S << K;
    StableD out;
    bool converged = false;
    for (unsigned it = 1; it <= 256; ++it) {
        BigInt D_P = D;
        for (const auto& r : pool.reserves) D_P = D_P * D / ((BigInt(r) << K) * n);
        BigInt num = (p.annNum * (S << K) + D_P * n * p.ampDen) * D;
        BigInt den = (p.annNum - p.ampDen) * D + (n + 1) * D_P * p.ampDen;
        if (den <= 0) break;
        BigInt next = num / den;
        out.iterations = it;
        BigInt diff = next > D ? BigInt(next - D) : BigInt(D - next);
        D = next;
        if (diff <= 1) {
            converged = true;
            break;
        }
    }
    if (!converged || D <= 0) D = bisect_D(p, S, P);

    // Snap to the largest grid point with F <= 0.
    for (unsigned guard = 0; sign_F(p, D, S, P) > 0; ++guard) {
        if (guard > 64) throw NoConvergence("stableswap D did not settle");
        D -= 1;
    }
    for (unsigned guard = 0; sign_F(p, D + 1, S, P) <= 0; ++guard) {
        if (guard > 64) throw NoConvergence("stableswap D did not settle");
        D += 1;
    }
    out.scaled = D;
    return out;
}

Rational stableswap_residual(const std::vector<Rational>& reserves, const Rational& amp, const Rational& D) {
    const std::size_t n = reserves.size();
    Rational S = 0, P = 1, nn = 1;
    for (const auto& r : reserves) {
        S += r;
        P *= r;
        nn *= static_cast<unsigned>(n);
    }
    Rational ann = amp * nn;
    Rational Dp = D;
    for (std::size_t i = 0; i < n; ++i) Dp *= D;
    Rational lhs = ann * S + D;
    Rational diff = lhs - ann * D - Dp / (nn * P);
    if (diff < 0) diff = -diff;
    return diff / lhs;
}

Rational stableswap_residual(const StableswapPool& pool, const Rational& D) {
    std::vector<Rational> r;
    for (const auto& x : pool.reserves) r.emplace_back(BigInt(x));
    return stableswap_residual(r, Rational(BigInt(pool.amp), BigInt(pool.ampPrecision)), D);
}

StableswapSwap stableswap_swap(const StableswapPool& pool, std::size_t i, std::size_t j, const U256& dx) {
    Params p = params_of(pool);
    if (i >= p.n || j >= p.n || i == j) throw InvalidArgument("swap indices must be distinct pool positions");
    if (dx == 0) throw InvalidArgument("swap amount must be positive");

    StableswapSwap out;
    out.D = stableswap_solve_D(pool);
    const Rational D = out.D.value();
    const Rational ann(p.annNum, p.ampDen);

    // y^2 + B y - c = 0 with B = S' + D/Ann - D, c = D^(n+1) / (n^n P' Ann), over k != j.
    Rational S_rest = 0, P_rest = 1;
    for (std::size_t k = 0; k < p.n; ++k) {
        if (k == j) continue;
        BigInt x(pool.reserves[k]);
        if (k == i) x += BigInt(dx);
        S_rest += x;
        P_rest *= x;
    }
    Rational Dp = D;
    for (std::size_t k = 0; k < p.n; ++k) Dp *= D;
    const Rational B = S_rest + D / ann - D;
    const Rational c = Dp / (Rational(p.nn) * P_rest * ann);

    const BigInt one_k = BigInt(1) << K;
    auto h_sign = [&](const BigInt& m) {
        Rational y(m, one_k);
        Rational v = y * y + B * y - c;
        return v.sign();
    };
    Rational disc = (B * B + 4 * c) * Rational(one_k * one_k);
    BigInt root = boost::multiprecision::sqrt(BigInt(numerator(disc) / denominator(disc)));
    Rational b_scaled = B * Rational(one_k);
    BigInt m = (root - BigInt(numerator(b_scaled) / denominator(b_scaled))) / 2;
    if (m < 0) m = 0;
    for (unsigned guard = 0; h_sign(m) > 0; ++guard) {
        if (guard > 64) throw NoConvergence("stableswap y did not settle");
        m -= 1;
    }
    for (unsigned guard = 0; h_sign(m + 1) <= 0; ++guard) {
        if (guard > 64) throw NoConvergence("stableswap y did not settle");
        m += 1;
    }
    out.yScaled = m;

    // Base-unit output: x_j - ceil(y).
    BigInt y_floor = m >> K;
    bool exact = h_sign(m) == 0 && (m & (one_k - 1)) == 0;
    BigInt y_ceil = exact ? y_floor : y_floor + 1;
    BigInt dy = BigInt(pool.reserves[j]) - y_ceil;
    if (dy <= 0) throw InsufficientLiquidity("stableswap output rounds to zero");

    out.dy = to_u256(dy);
    out.pool = pool;
    out.pool.reserves[i] = to_u256(BigInt(pool.reserves[i]) + BigInt(dx));
    out.pool.reserves[j] = to_u256(BigInt(pool.reserves[j]) - dy);
    return out;
}

Rational stableswap_probe_price(const StableswapPool& pool, std::size_t i, std::size_t j,
                                const std::optional<U256>& probe) {
    U256 dx = probe ? *probe : U256(pool.reserves.at(i) / 1000000);
    if (dx == 0) dx = 1;
    auto s = stableswap_swap(pool, i, j, dx);
    // Use the grid solution rather than the rounded dy so small probes keep their precision.
    Rational y(s.yScaled, BigInt(1) << K);
    return (Rational(BigInt(pool.reserves[j])) - y) / Rational(BigInt(dx));
}

}  // namespace pricescope
