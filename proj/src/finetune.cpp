// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/finetune.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <nlohmann/json.hpp>

#include "pricescope/trace.hpp"

namespace pricescope {

std::string_view to_string(PriceDirection d) { return d == PriceDirection::Inflate ? "inflate" : "deflate"; }

CpmmPool default_synthesis_pool() {
    CpmmPool p;
    p.tokenX = Address::from_hex("0x0000000000000000000000000000000000b7c020");
    p.tokenY = Address::from_hex("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2");
    p.reserveX = parse_u256("2000000000000000000000000");
    p.reserveY = parse_u256("5000000000000000000000");
    p.feeBps = 30;
    return p;
}

std::vector<BalancePair> generate_finetune_pairs(const CpmmPool& pool, std::size_t count, std::uint64_t seed,
                                                 const U256& lo, const U256& hi) {
    if (count == 0 || count % 2 != 0) throw InvalidArgument("pair count must be positive and even");
    if (lo == 0 || lo >= hi) throw InvalidArgument("amount range must satisfy 0 < lo < hi");

    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_int_distribution<BigInt> amount{BigInt(lo), BigInt(hi)};
    std::vector<BalancePair> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        PriceDirection dir = k % 2 == 0 ? PriceDirection::Inflate : PriceDirection::Deflate;
        U256 in = to_u256(amount(rng));
        // Inflating tokenY's price means pulling tokenY out: swap tokenX in.
        auto swap = cpmm_swap_exact_in(pool, dir == PriceDirection::Inflate ? pool.tokenX : pool.tokenY, in);
        out.push_back({BigInt(swap.pool.reserveX) - BigInt(pool.reserveX),
                       BigInt(swap.pool.reserveY) - BigInt(pool.reserveY), dir});
    }
    return out;
}

PromptTemplate PromptTemplate::parse(const std::string& text) {
    PromptTemplate t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line == "[system]" || line == "[user]" || line == "[assistant]") {
            t.sections.push_back({line.substr(1, line.size() - 2), ""});
            continue;
        }
        if (t.sections.empty()) {
            if (line.empty()) continue;
            throw TemplateError("template text before the first [role] section");
        }
        t.sections.back().content += line + "\n";
    }
    for (auto& s : t.sections) {
        while (!s.content.empty() && s.content.back() == '\n') s.content.pop_back();
    }
    if (t.sections.empty()) throw TemplateError("template has no sections");
    return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::vector<int> finetune_scores(PriceDirection d) {
    if (d == PriceDirection::Inflate) return {9, 2, 2, 9};
    return {2, 9, 9, 2};
}

namespace {

std::size_t count_of(const PromptTemplate& t, std::string_view needle) {
    std::size_t n = 0;
    for (const auto& s : t.sections) {
        for (auto pos = s.content.find(needle); pos != std::string::npos; pos = s.content.find(needle, pos + 1)) ++n;
    }
    return n;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

// Replaces successive occurrences across sections with successive values.
void replace_sequence(std::vector<ChatMessage>& sections, std::string_view from, const std::vector<std::string>& values) {
    std::size_t k = 0;
    for (auto& s : sections) {
        for (auto pos = s.content.find(from); pos != std::string::npos; pos = s.content.find(from, pos)) {
            const std::string& v = values[k % values.size()];
            s.content.replace(pos, from.size(), v);
            pos += v.size();
            ++k;
        }
    }
}

std::string verb(const BigInt& v) { return v > 0 ? "increases" : "decreases"; }

}  // namespace

std::string render_finetune_line(const BalancePair& pair, const PromptTemplate& tmpl, const std::string& code,
                                 const FinetuneNames& names) {
    for (std::string_view p : {"{code}", "{value_0}", "{value_1}", "{direction of change}", "{score}"}) {
        if (count_of(tmpl, p) == 0) throw TemplateError("template is missing placeholder " + std::string(p));
    }
    if (count_of(tmpl, "{score}") != 4) throw TemplateError("template needs exactly four {score} slots");

    std::vector<ChatMessage> msgs = tmpl.sections;
    // value_0 is WETH (tokenY), value_1 is BTC20 (tokenX).
    const BigInt& v0 = pair.deltaY;
    const BigInt& v1 = pair.deltaX;
    replace_sequence(msgs, "{direction of change}", {verb(v0), verb(v1)});
    auto scores = finetune_scores(pair.direction);
    std::vector<std::string> score_text;
    for (int s : scores) score_text.push_back(std::to_string(s));
    replace_sequence(msgs, "{score}", score_text);
    for (auto& m : msgs) {
        replace_all(m.content, "{value_0}", scale_decimal(v0, names.decimalsY));
        replace_all(m.content, "{value_1}", scale_decimal(v1, names.decimalsX));
        replace_all(m.content, "{contract_name}", names.contract);
        replace_all(m.content, "{code}", code);
    }

    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : msgs) messages.push_back({{"role", m.role}, {"content", m.content}});
    return nlohmann::json{{"messages", messages}}.dump();
}

void emit_finetune_jsonl(const std::vector<BalancePair>& pairs, const PromptTemplate& tmpl, const std::string& code,
                         const std::filesystem::path& path, const FinetuneNames& names) {
    std::string out;
    for (const auto& p : pairs) out += render_finetune_line(p, tmpl, code, names) + "\n";
    write_file_atomic(path, out);
}

std::vector<BalancePair> sample_pairs(const std::vector<BalancePair>& pairs, std::size_t n, std::uint64_t seed) {
    if (n > pairs.size()) throw InvalidArgument("sample larger than the pair set");
    std::vector<std::size_t> idx(pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Fisher-Yates with a fixed engine; std::shuffle's algorithm is implementation-defined.
    boost::random::mt19937_64 rng(seed);
    for (std::size_t i = idx.size(); i > 1; --i) {
        boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(idx[i - 1], idx[pick(rng)]);
    }
    std::vector<BalancePair> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pairs[idx[i]]);
    return out;
}

std::size_t train_count(std::size_t n) { return (n * 83 + 50) / 100; }

SplitPaths emit_finetune_split(const std::vector<BalancePair>& pairs, const PromptTemplate& tmpl,
                               const std::string& code, const std::filesystem::path& path,
                               const FinetuneNames& names) {
    std::size_t n_train = train_count(pairs.size());
    std::vector<BalancePair> train(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<BalancePair> valid(pairs.begin() + static_cast<std::ptrdiff_t>(n_train), pairs.end());
    auto base = path.parent_path() / path.stem();
    SplitPaths paths{base.string() + ".train.jsonl", base.string() + ".valid.jsonl"};
    emit_finetune_jsonl(train, tmpl, code, paths.train, names);
    emit_finetune_jsonl(valid, tmpl, code, paths.valid, names);
    return paths;
}

}  // namespace pricescope
