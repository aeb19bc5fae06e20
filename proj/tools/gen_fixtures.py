#!/usr/bin/env python3
# Copyright 2026 The PriceScope Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the hermetic trace fixtures under fixtures/.

Every fixture is a synthetic call tree in the pricescope fixture format (version 1).
Amounts for CPMM and stableswap pools come from the pool math below, so the pool
state in each fixture context stays consistent with the transfers.

    python3 tools/gen_fixtures.py [--out fixtures]
"""

import argparse
import hashlib
import json
from pathlib import Path

TRANSFER_TOPIC = "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"
WETH_DEPOSIT_TOPIC = "0xe1fffcc4923d04b559f4d29a8bfc6cda04eb5b0d3c460751c2402c5c5cc9109c"
ZERO = "0x" + "0" * 40

SEL = {
    "transfer": "0xa9059cbb",
    "transferFrom": "0x23b872dd",
    "mint": "0x40c10f19",
    "burn": "0x9dc29fac",
    "wrap": "0xd0e30db0",  # WETH deposit()
    "exchange": "0x3df02124",  # exchange(int128,int128,uint256,uint256)
    "swap": "0x38ed1739",  # swapExactTokensForTokens
    "deposit": "0xe8eda9df",  # deposit(address,uint256,address,uint16)
    "borrow": "0xa415bcad",  # borrow(address,uint256,uint256,uint16,address)
    "redeem": "0xdb006a75",  # redeem(uint256)
    "stake": "0xa694fc3a",  # stake(uint256)
    "claim": "0x3d18b912",  # getReward()
    "flashLoan": "0x5cffe9de",
    "onFlashLoan": "0x23e30c8b",
    "execute": "0x61461954",
    "route": "0x12aa3caf",
}

E18 = 10**18


def A(n):
    return "0x%040x" % n


def word(addr):
    return "0x" + "0" * 24 + addr[2:]


def u256(v):
    return "0x%064x" % v


def tx_hash(name):
    return "0x" + hashlib.sha256(name.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Call tree
# ---------------------------------------------------------------------------


def call(caller, callee, sel, *children, logs=()):
    return {"caller": caller, "callee": callee, "selector": SEL.get(sel, sel), "logs": list(logs),
            "children": list(children)}


def tlog(token, frm, to, amount):
    return {"address": token, "topics": [TRANSFER_TOPIC, word(frm), word(to)], "data": u256(amount)}


def move(caller, token, frm, to, amount):
    sel = "transfer" if caller == frm else "transferFrom"
    return call(caller, token, sel, logs=[tlog(token, frm, to, amount)])


def mint(caller, token, to, amount):
    return call(caller, token, "mint", logs=[tlog(token, ZERO, to, amount)])


def burn(caller, token, frm, amount):
    return call(caller, token, "burn", logs=[tlog(token, frm, ZERO, amount)])


def set_depth(frame, depth=0):
    frame["depth"] = depth
    for c in frame["children"]:
        set_depth(c, depth + 1)
    return frame


# ---------------------------------------------------------------------------
# Pool math
# ---------------------------------------------------------------------------


class Cpmm:
    def __init__(self, address, tokens, reserves, fee_bps=30):
        self.address, self.tokens, self.fee_bps = address, list(tokens), fee_bps
        self.initial = list(reserves)
        self.reserves = list(reserves)

    def out_for(self, tin, amount):
        i = self.tokens.index(tin)
        o = 1 - i
        kept = amount * (10000 - self.fee_bps)
        out = kept * self.reserves[o] // (self.reserves[i] * 10000 + kept)
        self.reserves[i] += amount
        self.reserves[o] -= out
        return self.tokens[o], out

    def config(self):
        return {"address": self.address, "model": "cpmm", "tokens": self.tokens,
                "reserves": [str(r) for r in self.initial], "feeBps": self.fee_bps}


class Stableswap:
    """Two-or-more coin stableswap with Ann = A * n^n (Curve form)."""

    def __init__(self, address, tokens, reserves, amp, fee_bps=4):
        self.address, self.tokens, self.amp, self.fee_bps = address, list(tokens), amp, fee_bps
        self.initial = list(reserves)
        self.reserves = list(reserves)

    def _ann(self):
        n = len(self.tokens)
        return self.amp * n**n

    def get_d(self, xs):
        n = len(xs)
        s = sum(xs)
        if s == 0:
            return 0
        d, ann = s, self._ann()
        for _ in range(255):
            dp = d
            for x in xs:
                dp = dp * d // (x * n)
            prev = d
            d = (ann * s + dp * n) * d // ((ann - 1) * d + (n + 1) * dp)
            if abs(d - prev) <= 1:
                return d
        raise RuntimeError("D did not converge")

    def get_y(self, i, j, x, xs):
        n = len(xs)
        d, ann = self.get_d(xs), self._ann()
        c, s = d, 0
        for k in range(n):
            if k == j:
                continue
            xk = x if k == i else xs[k]
            s += xk
            c = c * d // (xk * n)
        c = c * d // (ann * n)
        b = s + d // ann
        y = d
        for _ in range(255):
            prev = y
            y = (y * y + c) // (2 * y + b - d)
            if abs(y - prev) <= 1:
                return y
        raise RuntimeError("y did not converge")

    def out_for(self, tin, amount):
        i = self.tokens.index(tin)
        j = 1 - i if len(self.tokens) == 2 else (i + 1) % len(self.tokens)
        y = self.get_y(i, j, self.reserves[i] + amount, self.reserves)
        dy = self.reserves[j] - y - 1
        dy -= dy * self.fee_bps // 10000
        self.reserves[i] += amount
        self.reserves[j] -= dy
        return self.tokens[j], dy

    def config(self):
        return {"address": self.address, "model": "stableswap", "tokens": self.tokens,
                "reserves": [str(r) for r in self.initial], "feeBps": self.fee_bps, "amp": str(self.amp),
                "ampPrecision": "1"}


# ---------------------------------------------------------------------------
# Fixture assembly
# ---------------------------------------------------------------------------


class Fixture:
    def __init__(self, name, block=20_000_000):
        self.name, self.block = name, block
        self.tokens, self.labels, self.pools, self.oracles = {}, {}, [], []
        self.wrapped = []

    def _claim(self, addr):
        if addr in self.tokens or addr in self.labels:
            raise ValueError("%s: address %s used twice" % (self.name, addr))

    def token(self, addr, symbol, decimals=18):
        self._claim(addr)
        self.tokens[addr] = {"symbol": symbol, "decimals": decimals}
        return addr

    def label(self, addr, name):
        self._claim(addr)
        self.labels[addr] = name
        return addr

    def pool(self, p, name):
        self.pools.append(p)
        self.label(p.address, name)
        return p

    def oracle(self, contract, token, kind, inputs, constants=()):
        self.oracles.append({"contract": contract, "token": token, "kind": kind,
                             "inputs": [{"pool": p, "token": t} for p, t in inputs], "constants": list(constants)})

    def document(self, initiator, entry):
        ctx = {"tokens": self.tokens, "labels": self.labels, "pools": [p.config() for p in self.pools],
               "oracles": self.oracles}
        if self.wrapped:
            ctx["wrappedNative"] = self.wrapped
        return {"version": 1, "txHash": tx_hash(self.name), "chainId": 1, "blockNumber": self.block,
                "initiator": initiator, "calls": [set_depth(entry)], "context": ctx}


EOA = A(0xE0A)
ATTACK = A(0xA77AC)


def swap_call(uc, pool, tin, amount):
    """User calls the pool; the pool pulls the input and pays the output."""
    tout, out = pool.out_for(tin, amount)
    sel = "exchange" if isinstance(pool, Stableswap) else "swap"
    return call(uc, pool.address, sel, move(pool.address, tin, uc, pool.address, amount),
                move(pool.address, tout, pool.address, uc, out))


def deposit_call(uc, protocol, asset, vault, amount, proof, shares):
    return call(uc, protocol, "deposit", move(protocol, asset, uc, vault, amount), mint(protocol, proof, uc, shares))


def borrow_call(uc, protocol, asset, vault, amount, debt):
    return call(uc, protocol, "borrow", move(protocol, asset, vault, uc, amount), mint(protocol, debt, uc, amount))


def withdraw_call(uc, protocol, proof, shares, asset, amount):
    return call(uc, protocol, "redeem", burn(protocol, proof, uc, shares), move(protocol, asset, protocol, uc, amount))


def stake_call(uc, staking, token, amount):
    return call(uc, staking, "stake", move(staking, token, uc, staking, amount))


def claim_call(uc, staking, token, amount):
    return call(uc, staking, "claim", move(staking, token, staking, uc, amount))


def donate_call(uc, token, to, amount):
    return move(uc, token, uc, to, amount)


# ---------------------------------------------------------------------------
# Router walk-through
# ---------------------------------------------------------------------------


def fig4():
    f = Fixture("fig4")
    router = f.label(A(0x7007), "Router")
    ca = [None] + [f.label(A(0xCA0 + i), "CA%d" % i) for i in range(1, 7)]
    ta, tb, tc, td = (f.token(A(0x70A + i), s) for i, s in enumerate("ABCD"))
    moves = [(ta, ATTACK, ca[1], 100), (ta, ATTACK, ca[4], 10), (tc, ATTACK, ca[5], 20), (tb, ca[1], ca[2], 90),
             (tc, ca[2], ca[3], 80), (tc, ca[5], ca[6], 20), (td, ca[3], ATTACK, 70)]
    inner = [move(router, t, frm, to, v) for t, frm, to, v in moves]
    entry = call(EOA, ATTACK, "execute", call(ATTACK, router, "route", *inner))
    return f.document(EOA, entry)


# ---------------------------------------------------------------------------
# UwU Lend reconstruction
# ---------------------------------------------------------------------------

UWU_LENDING_POOL = A(0x1E9D0)
UWU_EMAP = ["0.9995", "0.9998", "1.0001", "1.0002", "1.0004"]


def uwulend():
    f = Fixture("uwulend", block=20_061_318)
    usde = f.token(A(0x05DE), "USDe")
    susde = f.token(A(0x5005DE), "sUSDe")
    weth = f.token(A(0xE7E), "WETH")
    uweth = f.token(A(0x1E7E0), "uWETH")
    debt = f.token(A(0xDE575DE), "variableDebtsUSDe")
    others = [f.token(A(0x57A0 + i), s) for i, s in enumerate(["DAI", "FRAX", "crvUSD", "GHO", "LUSD"])]
    provider = f.label(A(0xF1A54), "FlashLender")
    lending = f.label(UWU_LENDING_POOL, "uwuLendingPool")
    vault_weth = f.label(A(0xA0E7E), "uWETHReserve")
    vault_susde = f.label(A(0xA5005DE), "uSUSDeReserve")
    f.label(ATTACK, "AttackContract")
    pools = []
    for i, t in enumerate(others):
        p = Stableswap(A(0xC0E0 + i), [usde, t], [10_000_000 * E18, 10_000_000 * E18], 200)
        pools.append(f.pool(p, "Curve USDe/%s" % f.tokens[t]["symbol"]))
    f.oracle(lending, susde, "median", [(p.address, usde) for p in pools], UWU_EMAP)

    flash = 40_000_000 * E18
    dump = flash // len(pools)
    callback = [swap_call(ATTACK, p, usde, dump) for p in pools]
    callback.append(deposit_call(ATTACK, lending, weth, vault_weth, 5_000 * E18, uweth, 5_000 * E18))
    callback.append(borrow_call(ATTACK, lending, susde, vault_susde, 4_000_000 * E18, debt))
    for p, t in zip(pools, others):
        got = p.initial[1] - p.reserves[1]
        callback.append(swap_call(ATTACK, p, t, got))
    loan = call(ATTACK, provider, "flashLoan", move(provider, usde, provider, ATTACK, flash),
                call(provider, ATTACK, "onFlashLoan", *callback), move(provider, usde, ATTACK, provider, flash))
    entry = call(EOA, ATTACK, "execute", loan)
    return f.document(EOA, entry)


UWU_ORACLE_SOL = """// SPDX-License-Identifier: MIT
pragma solidity 0.8.19;

interface ICurvePool {
    function get_p() external view returns (uint256);
    function price_oracle() external view returns (uint256);
}

/// sUSDe price used by the lending pool: median of spot and EMA prices of USDe
/// across five Curve pools.
contract sUSDePriceProviderBUniCatch {
    ICurvePool[5] public pools;

    function getPrice() external view returns (int256) {
        (uint256[] memory prices, bool uniFail) = _getPrices(true);
        uint256 median = uniFail ? (prices[5] + prices[6]) / 2 : prices[5];
        require(median > 0, "median is zero");
        return int256(median);
    }

    function _getPrices(bool sorted) internal view returns (uint256[] memory, bool) {
        uint256[] memory prices = new uint256[](11);
        for (uint256 i = 0; i < 5; i++) {
            prices[i] = pools[i].get_p();          // instantaneous
            prices[i + 5] = pools[i].price_oracle(); // exponential moving average
        }
        if (sorted) _bubbleSort(prices);
        return (prices, false);
    }

    function _bubbleSort(uint256[] memory arr) internal pure {
        uint256 n = arr.length;
        for (uint256 i = 0; i < n; i++) {
            for (uint256 j = 0; j + 1 < n - i; j++) {
                if (arr[j] > arr[j + 1]) (arr[j], arr[j + 1]) = (arr[j + 1], arr[j]);
            }
        }
    }
}
"""

UWU_POOL_SOL = """// SPDX-License-Identifier: MIT
pragma solidity 0.8.19;

import {sUSDePriceProviderBUniCatch} from "./sUSDePriceProvider.sol";

contract LendingPool {
    sUSDePriceProviderBUniCatch public oracle;
    mapping(address => uint256) public collateral;

    function deposit(address asset, uint256 amount, address onBehalfOf, uint16 referralCode) external {
        collateral[onBehalfOf] += amount;
    }

    function borrow(address asset, uint256 amount, uint256 rateMode, uint16 referralCode, address onBehalfOf) external {
        uint256 debtValue = amount * uint256(oracle.getPrice()) / 1e8;
        require(debtValue <= collateral[onBehalfOf] * 8 / 10, "undercollateralized");
    }
}
"""


# ---------------------------------------------------------------------------
# Attack patterns
# ---------------------------------------------------------------------------


class Cast:
    """Tokens, pools and protocol contracts shared by the pattern fixtures."""

    def __init__(self, f):
        self.f = f
        self.ta = f.token(A(0x7A), "TKA")
        self.tb = f.token(A(0x7B), "TKB")
        self.tc = f.token(A(0x7C), "TKC")
        self.tw = f.token(A(0x7D), "TKW")
        self.share = f.token(A(0x5A1E), "vShare")
        self.debt = f.token(A(0xDEB7), "dTKC")
        self.p1 = f.pool(Cpmm(A(0xB001), [self.ta, self.tb], [1_000_000 * E18, 1_000_000 * E18]), "PoolAB")
        self.p2 = f.pool(Cpmm(A(0xB002), [self.tb, self.tc], [1_000_000 * E18, 1_000_000 * E18]), "PoolBC")
        self.pc = f.pool(Cpmm(A(0xB003), [self.tc, self.tw], [1_000_000 * E18, 1_000_000 * E18]), "PoolCW")
        self.lend = f.label(A(0x1E4D), "LendingMarket")
        self.stake = f.label(A(0x57A4E), "StakingRewards")
        self.vault = f.label(A(0xA417), "Vault")
        f.label(ATTACK, "AttackContract")

    def spot_oracle(self, contract):
        """contract prices TKC by PoolCW's spot price."""
        self.f.oracle(contract, self.tc, "spot", [(self.pc.address, self.tc)])


def entry(*calls):
    return call(EOA, ATTACK, "execute", *calls)


def pattern_fixture(pid):
    f = Fixture("pattern_" + pid)
    c = Cast(f)
    U = ATTACK
    amt = 50_000 * E18
    if pid == "I":
        calls = [swap_call(U, c.p1, c.ta, amt),
                 donate_call(U, c.tc, c.p2.address, 200_000 * E18)]
        c.p2.reserves[1] += 200_000 * E18
        got = c.p1.initial[1] - c.p1.reserves[1]
        calls.append(swap_call(U, c.p2, c.tb, got))
    elif pid == "II":
        calls = [donate_call(U, c.tb, c.p1.address, 200_000 * E18)]
        c.p1.reserves[1] += 200_000 * E18
        calls.append(swap_call(U, c.p1, c.ta, amt))
        got = c.p1.initial[1] + 200_000 * E18 - c.p1.reserves[1]
        calls.append(swap_call(U, c.p2, c.tb, got))
    elif pid in ("III", "IV"):
        c.spot_oracle(c.lend)
        dep = deposit_call(U, c.lend, c.ta, c.lend, amt, c.share, amt)
        pump = swap_call(U, c.pc, c.tc, 300_000 * E18)
        bor = borrow_call(U, c.lend, c.tc, c.lend, 120_000 * E18, c.debt)
        calls = [dep, pump, bor] if pid == "III" else [pump, dep, bor]
    elif pid in ("V", "VI"):
        c.spot_oracle(c.stake)
        stk = stake_call(U, c.stake, c.ta, amt)
        pump = swap_call(U, c.pc, c.tc, 300_000 * E18)
        clm = claim_call(U, c.stake, c.tc, 90_000 * E18)
        calls = [stk, pump, clm] if pid == "V" else [pump, stk, clm]
    else:
        c.spot_oracle(c.vault)
        dep = deposit_call(U, c.vault, c.ta, c.vault, amt, c.share, amt)
        pump = swap_call(U, c.pc, c.tc, 300_000 * E18)
        wd = withdraw_call(U, c.vault, c.share, amt, c.tc, 80_000 * E18)
        calls = [dep, pump, wd] if pid == "VII" else [pump, dep, wd]
    return f.document(EOA, entry(*calls))


# ---------------------------------------------------------------------------
# Benign traffic
# ---------------------------------------------------------------------------


def benign_fixture(kind):
    f = Fixture("benign_" + kind)
    c = Cast(f)
    U = ATTACK
    amt = 10_000 * E18
    if kind == "single_swap":
        calls = [swap_call(U, c.p1, c.ta, amt)]
    elif kind == "deposit_withdraw":
        calls = [deposit_call(U, c.vault, c.ta, c.vault, amt, c.share, amt),
                 withdraw_call(U, c.vault, c.share, amt, c.ta, amt)]
    elif kind == "stake_only":
        calls = [stake_call(U, c.stake, c.ta, amt)]
    elif kind == "transfer_only":
        calls = [donate_call(U, c.ta, A(0xF12E4D), amt)]
    elif kind == "round_trip":
        first = swap_call(U, c.p1, c.ta, amt)
        got = c.p1.initial[1] - c.p1.reserves[1]
        calls = [first, swap_call(U, c.p1, c.tb, got)]
    elif kind == "deposit_borrow":
        c.spot_oracle(c.lend)
        calls = [deposit_call(U, c.lend, c.ta, c.lend, amt, c.share, amt),
                 borrow_call(U, c.lend, c.tc, c.lend, amt // 2, c.debt)]
    elif kind == "flash_repay":
        lender = f.label(A(0xF1A54), "FlashLender")
        calls = [call(U, lender, "flashLoan", move(lender, c.ta, lender, U, amt),
                      call(lender, U, "onFlashLoan"), move(lender, c.ta, U, lender, amt))]
    elif kind == "wrap_swap":
        weth = f.token(A(0xE7E), "WETH")
        f.wrapped.append(weth)
        pw = f.pool(Cpmm(A(0xB0E7), [weth, c.ta], [1_000 * E18, 3_000_000 * E18]), "PoolWETH")
        wrap = call(U, weth, "wrap", logs=[{"address": weth, "topics": [WETH_DEPOSIT_TOPIC, word(U)],
                                            "data": u256(2 * E18)}])
        calls = [wrap, swap_call(U, pw, weth, 2 * E18)]
    else:
        raise ValueError(kind)
    return f.document(EOA, entry(*calls))


BENIGN = ["single_swap", "deposit_withdraw", "stake_only", "transfer_only", "round_trip", "deposit_borrow",
          "flash_repay", "wrap_swap"]
PATTERNS = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"]


# ---------------------------------------------------------------------------
# Search budget
# ---------------------------------------------------------------------------


def pathological(width=4, layers=12):
    """Layered graph with width**layers UC-to-UC paths, all time-increasing."""
    f = Fixture("pathological")
    router = f.label(A(0x7007), "Router")
    toks = [f.token(A(0x9000 + l), "L%d" % l) for l in range(layers + 1)]
    node = lambda l, k: A(0x100000 + l * 0x100 + k)
    inner = [move(router, toks[0], ATTACK, node(1, k), 1000) for k in range(width)]
    for l in range(1, layers):
        for a in range(width):
            for b in range(width):
                inner.append(move(router, toks[l], node(l, a), node(l + 1, b), 10))
    inner += [move(router, toks[layers], node(layers, k), ATTACK, 900) for k in range(width)]
    return f.document(EOA, entry(call(ATTACK, router, "route", *inner)))


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    out = Path(ap.parse_args().out)
    write(out / "fig4.json", fig4())
    write(out / "uwulend.json", uwulend())
    bundle = out / "bundles" / "uwulend" / UWU_LENDING_POOL
    write(bundle / "metadata.json", {"verified": True, "address": UWU_LENDING_POOL, "tokens": [A(0x5005DE)]})
    (bundle / "sUSDePriceProvider.sol").write_text(UWU_ORACLE_SOL)
    (bundle / "LendingPool.sol").write_text(UWU_POOL_SOL)
    for p in PATTERNS:
        write(out / "patterns" / ("pattern_%s.json" % p), pattern_fixture(p))
    for b in BENIGN:
        write(out / "benign" / ("%s.json" % b), benign_fixture(b))
    write(out / "pathological.json", pathological())


if __name__ == "__main__":
    main()
