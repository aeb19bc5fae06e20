// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricescope/amm.hpp"
#include "pricescope/finetune.hpp"
#include "pricescope/operations.hpp"
#include "pricescope/trace.hpp"
#include "pricescope/transfers.hpp"

namespace pricescope {

enum class Direction { Increase, Decrease };
std::string_view to_string(Direction d);
//! "increases" / "decreases"
std::string_view change_word(Direction d);
inline Direction opposite(Direction d) { return d == Direction::Increase ? Direction::Decrease : Direction::Increase; }

enum class Backend { Analytic, LlmTypeI, LlmTypeII };
std::string_view to_string(Backend b);

//! What the scan is allowed to use. Auto runs the analytic backend first and asks the
//! LLM only about contracts the analytic backend cannot model.
enum class BackendKind { Analytic, LlmTypeI, LlmTypeII, Auto };
std::string_view to_string(BackendKind k);
//! "analytic" | "llm-type1" | "llm-type2" | "auto"; throws InvalidArgument otherwise.
BackendKind backend_kind_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Statements and change descriptions
// ---------------------------------------------------------------------------

struct PriceStatement {
    Address token;
    Address contract;
    Direction direction = Direction::Increase;
    std::string text;

    bool operator==(const PriceStatement&) const = default;
};

//! "The price of {token} in {contract} increases after change"
std::string statement_text(const std::string& tokenName, const std::string& contractName, Direction d);

//! Increase/Decrease twins for every (token, contract) pair, tokens outermost.
std::vector<PriceStatement> generate_statements(const std::vector<Address>& tokens,
                                                const std::vector<Address>& contracts,
                                                const FixtureContext& ctx = {});
std::vector<PriceStatement> generate_statements(const std::vector<std::pair<Address, Address>>& pairs,
                                                const FixtureContext& ctx = {});

enum class ChangeScope { ContractBalance, TotalSupply };

struct ChangeDescription {
    Address token;
    ChangeScope scope = ChangeScope::ContractBalance;
    Address contract;  // unset for TotalSupply
    Direction direction = Direction::Increase;
    BigInt magnitude;  // > 0, base units
    std::string text;

    bool operator==(const ChangeDescription&) const = default;
};

//! One line per nonzero balance delta of an account outside the user-controlled set, then
//! one per token whose supply changed. Magnitudes are scaled by token decimals when known.
std::vector<ChangeDescription> describe_changes(std::span<const BalanceDelta> deltas, const UserControlledSet& uc,
                                                const FixtureContext& ctx = {});

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

struct Prompt {
    std::string system;
    std::string user;

    //! "[system]\n...\n[user]\n..." as stored in the template files.
    [[nodiscard]] std::string text() const;
    bool operator==(const Prompt&) const = default;
};

enum class TemplateKind { Type1, Type2, Finetune };
//! Built-in copy of templates/{type1,type2,finetune}.txt.
const PromptTemplate& default_template(TemplateKind kind);
//! Built-in copy of templates/cpmm_snippet.sol.
const std::string& default_cpmm_snippet();

//! Replaces each "{key}" for the given keys in one pass; other braces are left alone.
//! Throws TemplateError when a key does not occur in `text`.
std::string render_placeholders(const std::string& text, const std::map<std::string, std::string>& values);

//! Throws TemplateError on empty code, empty statements or a malformed template.
Prompt build_prompt_type1(const std::string& code, const std::vector<PriceStatement>& statements,
                          const std::vector<ChangeDescription>& changes,
                          const PromptTemplate& tmpl = default_template(TemplateKind::Type1));

//! Throws NotTwoToken unless poolTokens has exactly two entries, TemplateError as above.
Prompt build_prompt_type2(const PoolLabel& pool, const std::vector<Address>& poolTokens,
                          const std::vector<PriceStatement>& statements,
                          const std::vector<ChangeDescription>& changes, const FixtureContext& ctx = {},
                          const PromptTemplate& tmpl = default_template(TemplateKind::Type2));

// ---------------------------------------------------------------------------
// Scores and verdicts
// ---------------------------------------------------------------------------

struct ScoredStatement {
    PriceStatement statement;
    int score = 1;

    bool operator==(const ScoredStatement&) const = default;
};

//! Accepts "Statement N: score" lines inside free text, a JSON array of integers, or a
//! JSON object with "scores" or per-statement keys. Out-of-range scores are clamped to
//! [1, 10] with a "ScoreClamped" warning. Throws UnparseableResponse when a statement
//! has no score.
std::vector<ScoredStatement> parse_scores(const std::string& response, const std::vector<PriceStatement>& statements,
                                          std::vector<Warning>* warnings = nullptr);

//! Time position of the segment whose deltas produced a verdict.
struct VerdictAnchor {
    std::size_t invocation = 0;
    Span span;

    bool operator==(const VerdictAnchor&) const = default;
};

struct PriceChangeVerdict {
    Address token;
    Address contract;
    Direction direction = Direction::Increase;
    int confidence = 10;
    Backend backend = Backend::Analytic;
    VerdictAnchor anchor;

    bool operator==(const PriceChangeVerdict&) const = default;
};

//! Strict winner of each Increase/Decrease pair; ties and unpaired statements yield nothing.
std::vector<PriceChangeVerdict> resolve_verdicts(const std::vector<ScoredStatement>& scored,
                                                 Backend backend = Backend::LlmTypeI,
                                                 const VerdictAnchor& anchor = {});

nlohmann::json to_json(const PriceChangeVerdict& v);

// ---------------------------------------------------------------------------
// Analytic backend
// ---------------------------------------------------------------------------

//! Price of X is y/x; verdicts for both tokens when it moved. Throws InvalidArgument on
//! mismatched tokens, ZeroReserve.
std::vector<PriceChangeVerdict> analytic_infer(const CpmmPool& before, const CpmmPool& after,
                                               const Address& contract = {});

//! Marginal price of token i in units of token (i+1) mod n, measured with a probe swap at
//! both states. Throws InvalidArgument, ZeroReserve, NoConvergence.
std::vector<PriceChangeVerdict> analytic_infer(const StableswapPool& before, const StableswapPool& after,
                                               const Address& contract = {});

//! Replays transfers over the pool and oracle models of a fixture context.
class AnalyticModel {
  public:
    explicit AnalyticModel(const FixtureContext& ctx);

    //! Pools and oracle contracts the model prices.
    [[nodiscard]] bool covers(const Address& contract) const;
    [[nodiscard]] bool empty() const { return pools_.empty(); }

    //! Applies the transfers and returns a verdict for every modeled price that moved.
    //! Pools whose balance would go negative are dropped with a warning.
    std::vector<PriceChangeVerdict> step(std::span<const TransferAction> transfers, const VerdictAnchor& anchor,
                                         std::vector<Warning>* warnings = nullptr);

    //! Current price of `token` in `pool` (other-token units), throws on unknown pools.
    [[nodiscard]] Rational pool_price(const Address& pool, const Address& token) const;
    //! Current value of an oracle.
    [[nodiscard]] Rational oracle_price(const OracleConfig& oracle) const;

  private:
    struct PoolState {
        PoolConfig config;
        std::vector<BigInt> balances;
        bool valid = true;
    };

    const FixtureContext& ctx_;
    std::map<Address, PoolState> pools_;
};

}  // namespace pricescope
