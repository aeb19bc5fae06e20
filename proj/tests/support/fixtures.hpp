// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// Paths to the shipped fixtures and golden files.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pricescope/detect.hpp"

namespace pricescope::testing {

inline std::filesystem::path repo_path(const std::string& rel) { return std::filesystem::path(PRICESCOPE_DATA_DIR) / rel; }
inline std::filesystem::path fixture_path(const std::string& rel) { return repo_path("fixtures/" + rel); }
inline std::filesystem::path golden_path(const std::string& name) { return repo_path("tests/golden/" + name); }

inline const std::vector<std::string>& pattern_names() {
    static const std::vector<std::string> names = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    return names;
}

inline const std::vector<std::string>& benign_names() {
    static const std::vector<std::string> names = {"single_swap",  "deposit_withdraw", "stake_only", "transfer_only",
                                                   "round_trip",   "deposit_borrow",   "flash_repay", "wrap_swap"};
    return names;
}

//! Report JSON without the wall-clock timings, for golden comparison.
inline nlohmann::json stable_json(const DetectionReport& r, const FixtureContext& ctx) {
    auto j = to_json(r, ctx);
    j.erase("timings");
    return j;
}

//! UwU Lend lending pool; its verified sources live under fixtures/bundles/uwulend.
inline Address uwu_lending_pool() { return Address::from_hex("0x000000000000000000000000000000000001e9d0"); }
inline Address uwu_susde() { return Address::from_hex("0x00000000000000000000000000000000005005de"); }

}  // namespace pricescope::testing
