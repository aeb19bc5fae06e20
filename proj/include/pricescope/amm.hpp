// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "pricescope/common.hpp"

namespace pricescope {

// ---------------------------------------------------------------------------
// Constant product (x * y = k)
// ---------------------------------------------------------------------------

struct CpmmPool {
    Address tokenX;
    Address tokenY;
    U256 reserveX = 0;
    U256 reserveY = 0;
    std::uint32_t feeBps = 30;

    bool operator==(const CpmmPool&) const = default;
};

//! y / x, exact. Throws ZeroReserve when x is 0.
Rational cpmm_spot_price(const CpmmPool& pool);

struct CpmmSwap {
    U256 amountOut = 0;
    CpmmPool pool;
};

//! Uniswap V2 getAmountOut: floor(y * in * (1e4 - fee) / (x * 1e4 + in * (1e4 - fee))).
//! The full amountIn (fee included) is added to the input reserve.
CpmmSwap cpmm_swap_exact_in(const CpmmPool& pool, const Address& tokenIn, const U256& amountIn);

// ---------------------------------------------------------------------------
// Stableswap: Ann*S + D = Ann*D + D^(n+1) / (n^n * P), Ann = a * n^n, a = amp / ampPrecision
// ---------------------------------------------------------------------------

struct StableswapPool {
    std::vector<Address> tokens;
    std::vector<U256> reserves;
    U256 amp = 0;
    U256 ampPrecision = 1;

    bool operator==(const StableswapPool&) const = default;
};

//! Fractional bits of the fixed-point grid D and solved reserves live on.
inline constexpr unsigned kStableFracBits = 64;

//! D as floor(D_exact * 2^64); `scaled` is the largest grid point with F(D) <= 0.
struct StableD {
    BigInt scaled;
    unsigned iterations = 0;

    [[nodiscard]] Rational value() const { return Rational(scaled, BigInt(1) << kStableFracBits); }
    //! Whole-unit floor.
    [[nodiscard]] U256 floor() const { return to_u256(scaled >> kStableFracBits); }
};

//! Newton iteration seeded at S (at most 256 steps), falling back to bisection, then
//! snapped to the grid with an exact sign test. Throws ZeroReserve, InvalidArgument,
//! NoConvergence.
StableD stableswap_solve_D(const StableswapPool& pool);

//! Relative invariant residual |Ann*S + D - Ann*D - D^(n+1)/(n^n P)| / (Ann*S + D) for
//! rational reserves and D.
Rational stableswap_residual(const std::vector<Rational>& reserves, const Rational& amp, const Rational& D);
Rational stableswap_residual(const StableswapPool& pool, const Rational& D);

struct StableswapSwap {
    U256 dy = 0;
    StableswapPool pool;  // reserves after the swap, dy rounded down to base units
    StableD D;
    //! Exact-solution post-swap reserve of token j on the 2^-64 grid (floor).
    BigInt yScaled;
};

//! Swap dx of token i for token j holding D fixed. Throws InvalidArgument,
//! InsufficientLiquidity, NoConvergence.
StableswapSwap stableswap_swap(const StableswapPool& pool, std::size_t i, std::size_t j, const U256& dx);

//! Marginal price of token i in units of token j, measured as dy/dx of a probe swap of
//! max(1, x_i / 1e6) base units (or `probe` when given).
Rational stableswap_probe_price(const StableswapPool& pool, std::size_t i, std::size_t j,
                                const std::optional<U256>& probe = std::nullopt);

}  // namespace pricescope
