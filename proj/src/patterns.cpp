// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/patterns.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace pricescope {

using nlohmann::json;

std::string_view to_string(PatternId p) {
    static constexpr std::array<std::string_view, 8> names = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    return names[static_cast<int>(p) - 1];
}

std::string_view to_string(PatternFamily f) {
    switch (f) {
        case PatternFamily::BuySell: return "BuySell";
        case PatternFamily::DepositBorrow: return "DepositBorrow";
        case PatternFamily::StakeClaim: return "StakeClaim";
        case PatternFamily::DepositWithdraw: return "DepositWithdraw";
    }
    return "BuySell";
}

PatternFamily family_of(PatternId p) {
    switch (p) {
        case PatternId::I:
        case PatternId::II: return PatternFamily::BuySell;
        case PatternId::III:
        case PatternId::IV: return PatternFamily::DepositBorrow;
        case PatternId::V:
        case PatternId::VI: return PatternFamily::StakeClaim;
        default: return PatternFamily::DepositWithdraw;
    }
}

PatternId pattern_from_string(std::string_view s) {
    for (int i = 1; i <= 8; ++i) {
        if (to_string(static_cast<PatternId>(i)) == s) return static_cast<PatternId>(i);
    }
    throw InvalidArgument("unknown pattern '" + std::string(s) + "'");
}

namespace {

enum class Where { Between, Before };

// Price clause of a template: token variable, direction, and whose contracts (first or
// second operation) the verdict must be about.
struct Clause {
    char var;
    Direction dir;
    int role;
};

struct Template {
    PatternId id;
    OpKind first;
    OpKind second;
    Where where;
    std::array<const char*, 2> contractVars;
    std::vector<Clause> clauses;
};

constexpr Direction Inc = Direction::Increase;
constexpr Direction Dec = Direction::Decrease;

const std::vector<Template>& templates() {
    static const std::vector<Template> t = {
        {PatternId::I, OpKind::Swap, OpKind::Swap, Where::Between, {"Pool_buy", "Pool_sell"}, {{'y', Inc, 1}, {'z', Dec, 1}}},
        {PatternId::II, OpKind::Swap, OpKind::Swap, Where::Before, {"Pool_buy", "Pool_sell"},
         {{'x', Inc, 0}, {'y', Dec, 0}, {'y', Inc, 1}, {'z', Dec, 1}}},
        {PatternId::III, OpKind::Deposit, OpKind::Borrow, Where::Between, {"C_deposit", "C_borrow"},
         {{'x', Inc, 1}, {'z', Dec, 1}}},
        {PatternId::IV, OpKind::Deposit, OpKind::Borrow, Where::Before, {"C_deposit", "C_borrow"},
         {{'x', Inc, 1}, {'z', Dec, 1}}},
        {PatternId::V, OpKind::Stake, OpKind::Claim, Where::Between, {"C_stake", "C_claim"}, {{'y', Dec, 1}}},
        {PatternId::VI, OpKind::Stake, OpKind::Claim, Where::Before, {"C_stake", "C_claim"},
         {{'x', Inc, 0}, {'y', Dec, 1}}},
        {PatternId::VII, OpKind::Deposit, OpKind::Withdraw, Where::Between, {"C_deposit", "C_withdraw"},
         {{'y', Inc, 1}, {'z', Dec, 1}}},
        {PatternId::VIII, OpKind::Deposit, OpKind::Withdraw, Where::Before, {"C_deposit", "C_withdraw"},
         {{'x', Inc, 0}, {'y', Dec, 0}, {'y', Inc, 1}, {'z', Dec, 1}}},
    };
    return t;
}

// Token variables of an operation pair, or nothing when the pair does not chain.
std::optional<std::map<char, Address>> bind_tokens(PatternFamily fam, const DeFiOperation& a, const DeFiOperation& b) {
    std::map<char, Address> v;
    auto put = [&](char k, const std::optional<Address>& t) {
        if (t) v[k] = *t;
    };
    switch (fam) {
        case PatternFamily::BuySell:
            if (!a.tokenOut || !b.tokenIn || *a.tokenOut != *b.tokenIn) return std::nullopt;
            put('x', a.tokenIn);
            put('y', a.tokenOut);
            put('z', b.tokenOut);
            break;
        case PatternFamily::DepositBorrow:
            put('x', a.tokenIn);
            put('y', a.tokenProof);
            put('z', b.tokenOut);
            break;
        case PatternFamily::StakeClaim:
            put('x', a.tokenIn);
            put('y', b.tokenOut);
            break;
        case PatternFamily::DepositWithdraw:
            if (!a.tokenProof || !b.tokenProof || *a.tokenProof != *b.tokenProof) return std::nullopt;
            put('x', a.tokenIn);
            put('y', a.tokenProof);
            put('z', b.tokenOut);
            break;
    }
    return v;
}

bool has(const std::vector<Address>& v, const Address& a) { return std::find(v.begin(), v.end(), a) != v.end(); }

std::string op_phrase(const DeFiOperation& op, const FixtureContext& ctx) {
    auto tok = [&](const std::optional<Address>& t) { return t ? ctx.token_name(*t) : std::string("?"); };
    std::string where;
    for (std::size_t i = 0; i < op.contracts.size(); ++i) where += (i ? "/" : "") + ctx.contract_name(op.contracts[i]);
    std::string span = " (invocation " + std::to_string(op.invocation) + ", T" + std::to_string(op.span.first) + "-T" +
                       std::to_string(op.span.last) + ")";
    switch (op.kind) {
        case OpKind::Swap: return "swap " + tok(op.tokenIn) + " to " + tok(op.tokenOut) + " through " + where + span;
        case OpKind::Deposit: return "deposit " + tok(op.tokenIn) + " into " + where + span;
        case OpKind::Withdraw: return "withdraw " + tok(op.tokenOut) + " from " + where + span;
        case OpKind::Borrow: return "borrow " + tok(op.tokenOut) + " from " + where + span;
        case OpKind::Stake: return "stake " + tok(op.tokenIn) + " in " + where + span;
        case OpKind::Claim: return "claim " + tok(op.tokenOut) + " from " + where + span;
    }
    return "";
}

}  // namespace

std::vector<AttackFinding> match_patterns(const std::vector<DeFiOperation>& ops,
                                          const std::vector<PriceChangeVerdict>& verdicts, const MatchOptions& opts,
                                          const FixtureContext& ctx) {
    std::vector<AttackFinding> out;
    for (const auto& tpl : templates()) {
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const auto& a = ops[i];
            if (a.kind != tpl.first) continue;
            for (std::size_t j = 0; j < ops.size(); ++j) {
                const auto& b = ops[j];
                if (b.kind != tpl.second || !before(a.invocation, a.span, b.invocation, b.span)) continue;
                auto tokens = bind_tokens(family_of(tpl.id), a, b);
                if (!tokens) continue;

                // (role, contract) -> verdict indices satisfying some clause under that binding.
                std::map<std::pair<int, Address>, std::vector<std::size_t>> groups;
                for (std::size_t k = 0; k < verdicts.size(); ++k) {
                    const auto& v = verdicts[k];
                    if (v.confidence < opts.minConfidence) continue;
                    bool placed = tpl.where == Where::Between
                                      ? before(a.invocation, a.span, v.anchor.invocation, v.anchor.span) &&
                                            before(v.anchor.invocation, v.anchor.span, b.invocation, b.span)
                                      : before(v.anchor.invocation, v.anchor.span, a.invocation, a.span);
                    if (!placed) continue;
                    for (const auto& c : tpl.clauses) {
                        auto t = tokens->find(c.var);
                        const auto& op = c.role == 0 ? a : b;
                        if (t == tokens->end() || t->second != v.token || c.dir != v.direction ||
                            !has(op.contracts, v.contract)) {
                            continue;
                        }
                        auto& g = groups[{c.role, v.contract}];
                        if (g.empty() || g.back() != k) g.push_back(k);
                    }
                }

                for (const auto& [key, vs] : groups) {
                    AttackFinding f;
                    f.pattern = tpl.id;
                    f.operations = {i, j};
                    f.verdicts = vs;
                    f.invocationIndex = a.invocation;
                    for (const auto& [var, addr] : *tokens) f.bindings[std::string(1, var)] = addr;
                    f.bindings[tpl.contractVars[key.first]] = key.second;
                    const auto& other = key.first == 0 ? b : a;
                    if (other.contracts.size() == 1) f.bindings[tpl.contractVars[1 - key.first]] = other.contracts[0];

                    std::string prices;
                    std::set<std::pair<Address, Direction>> said;
                    for (auto k : vs) {
                        const auto& v = verdicts[k];
                        if (!said.insert({v.token, v.direction}).second) continue;
                        prices += std::string(prices.empty() ? "" : " or ") + "the price of " + ctx.token_name(v.token) +
                                  " in " + ctx.contract_name(v.contract) + " " + std::string(change_word(v.direction));
                    }
                    std::string head = "Pattern " + std::string(to_string(tpl.id)) + " (" +
                                       std::string(to_string(family_of(tpl.id))) + "): ";
                    if (tpl.where == Where::Between) {
                        f.narrative = head + op_phrase(a, ctx) + ", then " + prices + ", then " + op_phrase(b, ctx);
                    } else {
                        f.narrative = head + prices + ", then " + op_phrase(a, ctx) + ", then " + op_phrase(b, ctx);
                    }
                    out.push_back(std::move(f));
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [&](const AttackFinding& x, const AttackFinding& y) {
        const auto& ax = ops[x.operations[0]];
        const auto& ay = ops[y.operations[0]];
        return std::make_tuple(static_cast<int>(x.pattern), ax.invocation, ax.span.first) <
               std::make_tuple(static_cast<int>(y.pattern), ay.invocation, ay.span.first);
    });
    return out;
}

json to_json(const AttackFinding& f) {
    json bindings = json::object();
    for (const auto& [k, v] : f.bindings) bindings[k] = v.hex();
    return {{"pattern", to_string(f.pattern)},
            {"family", to_string(family_of(f.pattern))},
            {"operations", f.operations},
            {"verdicts", f.verdicts},
            {"invocation", f.invocationIndex},
            {"bindings", bindings},
            {"narrative", f.narrative}};
}

}  // namespace pricescope
