// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/inference.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "pricescope/templates_data.hpp"

namespace pricescope {

using nlohmann::json;

std::string_view to_string(Direction d) { return d == Direction::Increase ? "Increase" : "Decrease"; }

std::string_view change_word(Direction d) { return d == Direction::Increase ? "increases" : "decreases"; }

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Analytic: return "analytic";
        case Backend::LlmTypeI: return "llm-type1";
        case Backend::LlmTypeII: return "llm-type2";
    }
    return "analytic";
}

std::string_view to_string(BackendKind k) {
    switch (k) {
        case BackendKind::Analytic: return "analytic";
        case BackendKind::LlmTypeI: return "llm-type1";
        case BackendKind::LlmTypeII: return "llm-type2";
        case BackendKind::Auto: return "auto";
    }
    return "analytic";
}

BackendKind backend_kind_from_string(std::string_view s) {
    if (s == "analytic") return BackendKind::Analytic;
    if (s == "llm-type1") return BackendKind::LlmTypeI;
    if (s == "llm-type2") return BackendKind::LlmTypeII;
    if (s == "auto") return BackendKind::Auto;
    throw InvalidArgument("unknown backend '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

std::string statement_text(const std::string& tokenName, const std::string& contractName, Direction d) {
    return "The price of " + tokenName + " in " + contractName + " " + std::string(change_word(d)) + " after change";
}

std::vector<PriceStatement> generate_statements(const std::vector<std::pair<Address, Address>>& pairs,
                                                const FixtureContext& ctx) {
    std::vector<PriceStatement> out;
    std::set<std::pair<Address, Address>> seen;
    for (const auto& [token, contract] : pairs) {
        if (!seen.insert({token, contract}).second) continue;
        for (Direction d : {Direction::Increase, Direction::Decrease}) {
            out.push_back({token, contract, d, statement_text(ctx.token_name(token), ctx.contract_name(contract), d)});
        }
    }
    return out;
}

std::vector<PriceStatement> generate_statements(const std::vector<Address>& tokens,
                                                const std::vector<Address>& contracts, const FixtureContext& ctx) {
    std::vector<std::pair<Address, Address>> pairs;
    for (const auto& t : tokens) {
        for (const auto& c : contracts) pairs.emplace_back(t, c);
    }
    return generate_statements(pairs, ctx);
}

// ---------------------------------------------------------------------------
// Change descriptions
// ---------------------------------------------------------------------------

namespace {

std::string render_amount(const BigInt& magnitude, const Address& token, const FixtureContext& ctx) {
    auto it = ctx.tokens.find(token);
    unsigned decimals = it != ctx.tokens.end() && it->second.decimals ? *it->second.decimals : 0;
    return scale_decimal(magnitude, decimals);
}

}  // namespace

std::vector<ChangeDescription> describe_changes(std::span<const BalanceDelta> deltas, const UserControlledSet& uc,
                                                const FixtureContext& ctx) {
    std::vector<ChangeDescription> out;
    std::vector<std::pair<Address, I257>> supply;
    std::set<Address> supplySeen;

    for (const auto& d : deltas) {
        if (d.totalSupplyDelta && supplySeen.insert(d.token).second) supply.emplace_back(d.token, *d.totalSupplyDelta);
        if (d.delta == 0 || uc.contains(d.account) || is_null_account(d.account)) continue;
        ChangeDescription c;
        c.token = d.token;
        c.scope = ChangeScope::ContractBalance;
        c.contract = d.account;
        c.direction = d.delta > 0 ? Direction::Increase : Direction::Decrease;
        c.magnitude = BigInt(mp::abs(d.delta));
        c.text = "The balance of " + ctx.token_name(d.token) + " in " + ctx.contract_name(d.account) + " " +
                 std::string(change_word(c.direction)) + " by " + render_amount(c.magnitude, d.token, ctx);
        out.push_back(std::move(c));
    }
    for (const auto& [token, delta] : supply) {
        if (delta == 0) continue;
        ChangeDescription c;
        c.token = token;
        c.scope = ChangeScope::TotalSupply;
        c.direction = delta > 0 ? Direction::Increase : Direction::Decrease;
        c.magnitude = BigInt(mp::abs(delta));
        c.text = "The total supply of " + ctx.token_name(token) + " " + std::string(change_word(c.direction)) +
                 " by " + render_amount(c.magnitude, token, ctx);
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

std::string Prompt::text() const { return "[system]\n" + system + "\n[user]\n" + user + "\n"; }

const PromptTemplate& default_template(TemplateKind kind) {
    static const PromptTemplate type1 = PromptTemplate::parse(embedded::kType1);
    static const PromptTemplate type2 = PromptTemplate::parse(embedded::kType2);
    static const PromptTemplate finetune = PromptTemplate::parse(embedded::kFinetune);
    switch (kind) {
        case TemplateKind::Type1: return type1;
        case TemplateKind::Type2: return type2;
        case TemplateKind::Finetune: return finetune;
    }
    return type1;
}

const std::string& default_cpmm_snippet() {
    static const std::string snippet = embedded::kCpmmSnippet;
    return snippet;
}

std::string render_placeholders(const std::string& text, const std::map<std::string, std::string>& values) {
    for (const auto& [key, _] : values) {
        if (text.find("{" + key + "}") == std::string::npos) {
            throw TemplateError("template is missing placeholder {" + key + "}");
        }
    }
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            auto close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = values.find(text.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += "\n";
        out += lines[i];
    }
    return out;
}

std::string render_statements(const std::vector<PriceStatement>& statements) {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < statements.size(); ++i) {
        lines.push_back("Statement " + std::to_string(i + 1) + ": " + statements[i].text + ".");
    }
    return join_lines(lines);
}

std::string render_changes(const std::vector<ChangeDescription>& changes) {
    std::vector<std::string> lines;
    for (const auto& c : changes) lines.push_back(c.text + ".");
    return join_lines(lines);
}

Prompt render_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values) {
    const ChatMessage* system = nullptr;
    const ChatMessage* user = nullptr;
    for (const auto& s : tmpl.sections) {
        if (s.role == "system" && !system) system = &s;
        if (s.role == "user" && !user) user = &s;
    }
    if (!system || !user) throw TemplateError("prompt template needs [system] and [user] sections");
    return {system->content, render_placeholders(user->content, values)};
}

}  // namespace

Prompt build_prompt_type1(const std::string& code, const std::vector<PriceStatement>& statements,
                          const std::vector<ChangeDescription>& changes, const PromptTemplate& tmpl) {
    if (code.empty()) throw TemplateError("Type-I prompt needs a non-empty code snippet");
    if (statements.empty()) throw TemplateError("prompt needs at least one statement");
    return render_prompt(tmpl, {{"code", code},
                                {"changes", render_changes(changes)},
                                {"statements", render_statements(statements)}});
}

Prompt build_prompt_type2(const PoolLabel& pool, const std::vector<Address>& poolTokens,
                          const std::vector<PriceStatement>& statements,
                          const std::vector<ChangeDescription>& changes, const FixtureContext& ctx,
                          const PromptTemplate& tmpl) {
    if (poolTokens.size() != 2) {
        throw NotTwoToken("Type-II prompt needs a two-token pool, " + pool.address.hex() + " has " +
                          std::to_string(poolTokens.size()));
    }
    if (statements.empty()) throw TemplateError("prompt needs at least one statement");
    return render_prompt(tmpl, {{"pool_name", ctx.contract_name(pool.address)},
                                {"token_a", ctx.token_name(poolTokens[0])},
                                {"token_b", ctx.token_name(poolTokens[1])},
                                {"changes", render_changes(changes)},
                                {"statements", render_statements(statements)}});
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

namespace {

std::string strip_fences(const std::string& s) {
    auto open = s.find("```");
    if (open == std::string::npos) return s;
    auto body = s.find('\n', open);
    auto close = s.find("```", body == std::string::npos ? open + 3 : body);
    if (body == std::string::npos || close == std::string::npos) return s;
    return s.substr(body + 1, close - body - 1);
}

std::optional<long long> json_int(const json& v) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    if (v.is_string()) {
        try {
            std::size_t used = 0;
            long long n = std::stoll(v.get<std::string>(), &used);
            if (used == v.get<std::string>().size()) return n;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

// Scores keyed by 1-based statement number, or nullopt when the text is not JSON.
std::optional<std::map<std::size_t, long long>> scores_from_json(const std::string& response) {
    json j = json::parse(strip_fences(response), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (j.is_object() && j.contains("scores")) j = j["scores"];
    std::map<std::size_t, long long> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            auto n = json_int(j[i].is_object() && j[i].contains("score") ? j[i]["score"] : j[i]);
            if (n) out[i + 1] = *n;
        }
        return out;
    }
    if (j.is_object()) {
        static const std::regex key(R"(^\s*(?:statement\s*)?#?\s*(\d+)\s*$)", std::regex::icase);
        for (const auto& [k, v] : j.items()) {
            std::smatch m;
            auto n = json_int(v);
            if (n && std::regex_match(k, m, key)) out.try_emplace(std::stoul(m[1].str()), *n);
        }
        return out;
    }
    return std::nullopt;
}

std::map<std::size_t, long long> scores_from_text(const std::string& response) {
    static const std::regex labeled(R"(statement\s*#?\s*(\d+)\s*(?:\*\*)?\s*[:=\-]\s*(?:\*\*)?\s*(?:score\s*[:=]?\s*)?(-?\d+))",
                                    std::regex::icase);
    std::map<std::size_t, long long> out;
    for (auto it = std::sregex_iterator(response.begin(), response.end(), labeled); it != std::sregex_iterator();
         ++it) {
        try {
            out.try_emplace(std::stoul((*it)[1].str()), std::stoll((*it)[2].str()));
        } catch (const std::out_of_range&) {
            out.try_emplace(std::stoul((*it)[1].str()), (*it)[2].str().front() == '-' ? -1000 : 1000);
        }
    }
    return out;
}

}  // namespace

std::vector<ScoredStatement> parse_scores(const std::string& response, const std::vector<PriceStatement>& statements,
                                          std::vector<Warning>* warnings) {
    auto scores = scores_from_json(response);
    if (!scores || scores->empty()) scores = scores_from_text(response);

    std::vector<ScoredStatement> out;
    for (std::size_t i = 0; i < statements.size(); ++i) {
        auto it = scores->find(i + 1);
        if (it == scores->end()) {
            throw UnparseableResponse("no score for statement " + std::to_string(i + 1) + " of " +
                                      std::to_string(statements.size()));
        }
        long long s = it->second;
        if (s < 1 || s > 10) {
            long long clamped = std::clamp(s, 1LL, 10LL);
            if (warnings) {
                warnings->push_back({"ScoreClamped", "statement " + std::to_string(i + 1) + ": score " +
                                                         std::to_string(s) + " clamped to " + std::to_string(clamped)});
            }
            s = clamped;
        }
        out.push_back({statements[i], static_cast<int>(s)});
    }
    return out;
}

std::vector<PriceChangeVerdict> resolve_verdicts(const std::vector<ScoredStatement>& scored, Backend backend,
                                                 const VerdictAnchor& anchor) {
    // Keyed pairs in first-appearance order.
    std::vector<std::pair<Address, Address>> order;
    std::map<std::pair<Address, Address>, std::pair<std::optional<int>, std::optional<int>>> pairs;
    for (const auto& s : scored) {
        auto key = std::make_pair(s.statement.token, s.statement.contract);
        auto [it, inserted] = pairs.try_emplace(key);
        if (inserted) order.push_back(key);
        auto& slot = s.statement.direction == Direction::Increase ? it->second.first : it->second.second;
        if (!slot) slot = s.score;
    }
    std::vector<PriceChangeVerdict> out;
    for (const auto& key : order) {
        const auto& [inc, dec] = pairs[key];
        if (!inc || !dec || *inc == *dec) continue;
        Direction d = *inc > *dec ? Direction::Increase : Direction::Decrease;
        out.push_back({key.first, key.second, d, std::max(*inc, *dec), backend, anchor});
    }
    return out;
}

json to_json(const PriceChangeVerdict& v) {
    return {{"token", v.token.hex()},
            {"contract", v.contract.hex()},
            {"direction", to_string(v.direction)},
            {"confidence", v.confidence},
            {"backend", to_string(v.backend)},
            {"anchor", {{"invocation", v.anchor.invocation}, {"timeSpan", {v.anchor.span.first, v.anchor.span.last}}}}};
}

}  // namespace pricescope
