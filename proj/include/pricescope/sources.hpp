// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pricescope/common.hpp"

namespace pricescope {

//! Verified source of one contract. Unverified bundles carry no files.
struct SourceBundle {
    Address contract;
    std::map<std::string, std::string> files;
    bool verified = false;
    //! Tokens whose price the contract is known to compute (metadata "tokens").
    std::vector<Address> tokens;

    bool operator==(const SourceBundle&) const = default;
};

//! Reads `dir/metadata.json` ({verified, address?, tokens?}) and the source files beside
//! it. The contract address comes from "address" or the directory name. Throws ParseError.
SourceBundle load_source_bundle(const std::filesystem::path& dir);

//! Every bundle directory under `root`, keyed by contract.
std::map<Address, SourceBundle> load_source_bundles(const std::filesystem::path& root);

const std::vector<std::string>& default_price_keywords();

//! Bodies of every function whose name contains a keyword (case-insensitive) or whose
//! selector equals a "0x"-prefixed keyword, in file then source order, separated by blank
//! lines. Throws NoSource on unverified bundles.
std::string extract_price_functions(const SourceBundle& bundle,
                                    const std::vector<std::string>& keywords = default_price_keywords());

//! Canonical "name(type,...)" of a Solidity declaration's parameter list, e.g.
//! "getPrice(address)" for "getPrice(address asset)".
std::string canonical_signature(const std::string& name, const std::string& params);

}  // namespace pricescope
