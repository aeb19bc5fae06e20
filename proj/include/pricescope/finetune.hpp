// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pricescope/amm.hpp"

namespace pricescope {

//! Direction of tokenY's price (WETH in the default synthesis pool).
enum class PriceDirection { Inflate, Deflate };

std::string_view to_string(PriceDirection d);

//! Pool balance change (after - before) of both tokens for one simulated swap.
struct BalancePair {
    BigInt deltaX;
    BigInt deltaY;
    PriceDirection direction = PriceDirection::Inflate;

    bool operator==(const BalancePair&) const = default;
};

//! BTC20 (tokenX) / WETH (tokenY) pool, 2,000,000 BTC20 against 5,000 WETH, 30 bps.
CpmmPool default_synthesis_pool();

//! count/2 Inflate pairs (tokenX swapped in) interleaved with count/2 Deflate pairs
//! (tokenY swapped in), each simulated from `pool` with an amount uniform in [lo, hi].
//! count must be positive and even.
std::vector<BalancePair> generate_finetune_pairs(const CpmmPool& pool, std::size_t count, std::uint64_t seed,
                                                 const U256& lo, const U256& hi);

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

//! Plain-text template split into "[system]", "[user]" and "[assistant]" sections.
struct PromptTemplate {
    std::vector<ChatMessage> sections;

    static PromptTemplate parse(const std::string& text);
    static PromptTemplate load(const std::filesystem::path& path);
};

struct FinetuneNames {
    std::string contract = "UniswapV2:BTC20";
    unsigned decimalsX = 18;
    unsigned decimalsY = 18;
};

//! Scores written into the four statement slots: WETH up, WETH down, BTC20 up, BTC20 down.
std::vector<int> finetune_scores(PriceDirection d);

//! One chat-format JSON object (no trailing newline). Throws TemplateError when a required
//! placeholder ({code}, {value_0}, {value_1}, {direction of change}, {score}) is missing.
std::string render_finetune_line(const BalancePair& pair, const PromptTemplate& tmpl, const std::string& code,
                                 const FinetuneNames& names = {});

void emit_finetune_jsonl(const std::vector<BalancePair>& pairs, const PromptTemplate& tmpl, const std::string& code,
                         const std::filesystem::path& path, const FinetuneNames& names = {});

//! Deterministic sample of `n` distinct pairs (seeded shuffle, first n).
std::vector<BalancePair> sample_pairs(const std::vector<BalancePair>& pairs, std::size_t n, std::uint64_t seed);

//! Training share: round(n * 0.83).
std::size_t train_count(std::size_t n);

struct SplitPaths {
    std::filesystem::path train;
    std::filesystem::path valid;
};

//! Writes <stem>.train.jsonl and <stem>.valid.jsonl next to `path`.
SplitPaths emit_finetune_split(const std::vector<BalancePair>& pairs, const PromptTemplate& tmpl,
                               const std::string& code, const std::filesystem::path& path,
                               const FinetuneNames& names = {});

}  // namespace pricescope
