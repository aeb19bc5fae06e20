// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricescope/inference.hpp"
#include "pricescope/operations.hpp"

namespace pricescope {

enum class PatternId { I = 1, II, III, IV, V, VI, VII, VIII };
enum class PatternFamily { BuySell, DepositBorrow, StakeClaim, DepositWithdraw };

std::string_view to_string(PatternId p);
std::string_view to_string(PatternFamily f);
PatternFamily family_of(PatternId p);
//! "I".."VIII"; throws InvalidArgument otherwise.
PatternId pattern_from_string(std::string_view s);

struct AttackFinding {
    PatternId pattern = PatternId::I;
    std::vector<std::size_t> operations;  // indices into the matched op list, time-ordered
    std::vector<std::size_t> verdicts;    // indices into the verdict list
    std::size_t invocationIndex = 0;
    std::string narrative;
    //! Template variable -> address: tokens "x", "y", "z" and the contract variables.
    std::map<std::string, Address> bindings;

    bool operator==(const AttackFinding&) const = default;
};

struct MatchOptions {
    //! Verdicts below this confidence do not take part.
    int minConfidence = 6;
};

//! All findings of the eight templates. One finding per (pattern, operation pair, bound
//! contract), carrying every verdict that satisfies the template under that binding.
//! Sorted by (pattern, first operation position).
std::vector<AttackFinding> match_patterns(const std::vector<DeFiOperation>& ops,
                                          const std::vector<PriceChangeVerdict>& verdicts,
                                          const MatchOptions& opts = {}, const FixtureContext& ctx = {});

nlohmann::json to_json(const AttackFinding& f);

}  // namespace pricescope
