// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "pricescope/inference.hpp"

namespace pricescope {

namespace {

void push_moves(std::vector<PriceChangeVerdict>& out, const Address& token, const Address& contract,
                const Rational& before, const Rational& after) {
    if (before == after) return;
    out.push_back({token, contract, after > before ? Direction::Increase : Direction::Decrease, 10,
                   Backend::Analytic, {}});
}

std::size_t index_of(const std::vector<Address>& tokens, const Address& token) {
    auto it = std::find(tokens.begin(), tokens.end(), token);
    if (it == tokens.end()) throw InvalidArgument("token " + token.hex() + " is not in the pool");
    return static_cast<std::size_t>(it - tokens.begin());
}

}  // namespace

std::vector<PriceChangeVerdict> analytic_infer(const CpmmPool& before, const CpmmPool& after,
                                               const Address& contract) {
    if (before.tokenX != after.tokenX || before.tokenY != after.tokenY) {
        throw InvalidArgument("pool states have different tokens");
    }
    Rational pb = cpmm_spot_price(before);
    Rational pa = cpmm_spot_price(after);
    std::vector<PriceChangeVerdict> out;
    // Price of X is y/x, price of Y is its reciprocal.
    push_moves(out, before.tokenX, contract, pb, pa);
    push_moves(out, before.tokenY, contract, 1 / pb, 1 / pa);
    return out;
}

std::vector<PriceChangeVerdict> analytic_infer(const StableswapPool& before, const StableswapPool& after,
                                               const Address& contract) {
    if (before.tokens != after.tokens) throw InvalidArgument("pool states have different tokens");
    if (before.tokens.size() < 2) throw InvalidArgument("stableswap pool needs at least two tokens");
    std::vector<PriceChangeVerdict> out;
    if (before.reserves == after.reserves && before.amp == after.amp && before.ampPrecision == after.ampPrecision) {
        return out;
    }
    const std::size_t n = before.tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
        // Same probe size at both states so only the curve position differs.
        U256 probe = std::min(before.reserves[i], after.reserves[i]) / 1'000'000;
        if (probe == 0) probe = 1;
        Rational pb = stableswap_probe_price(before, i, (i + 1) % n, probe);
        Rational pa = stableswap_probe_price(after, i, (i + 1) % n, probe);
        push_moves(out, before.tokens[i], contract, pb, pa);
    }
    return out;
}

// ---------------------------------------------------------------------------
// AnalyticModel
// ---------------------------------------------------------------------------

namespace {

CpmmPool as_cpmm(const PoolConfig& c, const std::vector<BigInt>& bal) {
    CpmmPool p;
    p.tokenX = c.tokens[0];
    p.tokenY = c.tokens[1];
    p.reserveX = to_u256(bal[0]);
    p.reserveY = to_u256(bal[1]);
    p.feeBps = c.feeBps;
    return p;
}

StableswapPool as_stable(const PoolConfig& c, const std::vector<BigInt>& bal) {
    StableswapPool p;
    p.tokens = c.tokens;
    for (const auto& b : bal) p.reserves.push_back(to_u256(b));
    p.amp = c.amp;
    p.ampPrecision = c.ampPrecision;
    return p;
}

Rational price_in(const PoolConfig& c, const std::vector<BigInt>& bal, const Address& token) {
    std::size_t i = index_of(c.tokens, token);
    if (c.model == PoolModel::Cpmm) {
        if (bal[i] == 0) throw ZeroReserve("pool " + c.address.hex() + " has no " + token.hex());
        return Rational(bal[1 - i], bal[i]);
    }
    return stableswap_probe_price(as_stable(c, bal), i, (i + 1) % c.tokens.size());
}

Rational combine(const OracleConfig& oracle, std::vector<Rational> values) {
    if (oracle.kind == OracleKind::Spot) {
        if (values.empty()) throw InvalidArgument("spot oracle without input");
        return values.front();
    }
    for (const auto& c : oracle.constants) values.push_back(parse_decimal_rational(c));
    if (values.empty()) throw InvalidArgument("median oracle without inputs");
    std::sort(values.begin(), values.end());
    std::size_t m = values.size() / 2;
    if (values.size() % 2 == 1) return values[m];
    return (values[m - 1] + values[m]) / 2;
}

}  // namespace

AnalyticModel::AnalyticModel(const FixtureContext& ctx) : ctx_(ctx) {
    for (const auto& c : ctx.pools) {
        if (c.tokens.size() != c.reserves.size()) {
            throw ParseError("pool " + c.address.hex() + ": tokens and reserves differ in length");
        }
        if (c.model == PoolModel::Cpmm && c.tokens.size() != 2) {
            throw ParseError("CPMM pool " + c.address.hex() + " must hold exactly two tokens");
        }
        PoolState s{c, {}, true};
        for (const auto& r : c.reserves) s.balances.emplace_back(r);
        pools_.insert_or_assign(c.address, std::move(s));
    }
}

bool AnalyticModel::covers(const Address& contract) const {
    if (pools_.contains(contract)) return true;
    return std::any_of(ctx_.oracles.begin(), ctx_.oracles.end(),
                       [&](const OracleConfig& o) { return o.contract == contract; });
}

Rational AnalyticModel::pool_price(const Address& pool, const Address& token) const {
    auto it = pools_.find(pool);
    if (it == pools_.end()) throw InvalidArgument("unknown pool " + pool.hex());
    if (!it->second.valid) throw InvalidArgument("pool " + pool.hex() + " state is no longer tracked");
    return price_in(it->second.config, it->second.balances, token);
}

Rational AnalyticModel::oracle_price(const OracleConfig& oracle) const {
    std::vector<Rational> values;
    for (const auto& in : oracle.inputs) values.push_back(pool_price(in.pool, in.token));
    return combine(oracle, std::move(values));
}

std::vector<PriceChangeVerdict> AnalyticModel::step(std::span<const TransferAction> transfers,
                                                    const VerdictAnchor& anchor, std::vector<Warning>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back({"AnalyticModel", msg});
    };

    std::map<Address, std::vector<BigInt>> before;
    auto touch = [&](const Address& pool, const Address& token, const BigInt& delta) {
        auto it = pools_.find(pool);
        if (it == pools_.end() || !it->second.valid) return;
        auto& cfg = it->second.config;
        auto pos = std::find(cfg.tokens.begin(), cfg.tokens.end(), token);
        if (pos == cfg.tokens.end()) return;
        before.try_emplace(pool, it->second.balances);
        it->second.balances[pos - cfg.tokens.begin()] += delta;
    };
    for (const auto& t : transfers) {
        BigInt v(t.value);
        touch(t.sender, t.token, -v);
        touch(t.receiver, t.token, v);
    }

    std::vector<PriceChangeVerdict> out;
    std::map<Address, std::vector<BigInt>> snapshot;  // pre-step balances of every tracked pool
    for (const auto& c : ctx_.pools) {
        auto& state = pools_.at(c.address);
        auto prior = before.find(c.address);
        snapshot[c.address] = prior != before.end() ? prior->second : state.balances;
        if (prior == before.end() || !state.valid) continue;
        if (std::any_of(state.balances.begin(), state.balances.end(), [](const BigInt& b) { return b < 0; })) {
            state.valid = false;
            warn("pool " + c.address.hex() + " balance went negative; its reserves in the fixture are inconsistent");
            continue;
        }
        try {
            auto vs = c.model == PoolModel::Cpmm
                          ? analytic_infer(as_cpmm(c, prior->second), as_cpmm(c, state.balances), c.address)
                          : analytic_infer(as_stable(c, prior->second), as_stable(c, state.balances), c.address);
            for (auto& v : vs) {
                v.anchor = anchor;
                out.push_back(v);
            }
        } catch (const Error& e) {
            warn("pool " + c.address.hex() + ": " + e.what());
        }
    }

    for (const auto& o : ctx_.oracles) {
        bool moved = std::any_of(o.inputs.begin(), o.inputs.end(),
                                 [&](const OracleInput& in) { return before.contains(in.pool); });
        if (!moved) continue;
        try {
            std::vector<Rational> prior, after;
            for (const auto& in : o.inputs) {
                auto it = pools_.find(in.pool);
                if (it == pools_.end()) throw InvalidArgument("unknown pool " + in.pool.hex());
                if (!it->second.valid) throw InvalidArgument("pool " + in.pool.hex() + " state is no longer tracked");
                prior.push_back(price_in(it->second.config, snapshot.at(in.pool), in.token));
                after.push_back(price_in(it->second.config, it->second.balances, in.token));
            }
            Rational pv = combine(o, std::move(prior));
            Rational av = combine(o, std::move(after));
            if (pv != av) {
                out.push_back({o.token, o.contract, av > pv ? Direction::Increase : Direction::Decrease, 10,
                               Backend::Analytic, anchor});
            }
        } catch (const Error& e) {
            warn("oracle " + o.contract.hex() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace pricescope
