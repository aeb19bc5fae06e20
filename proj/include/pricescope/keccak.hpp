// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "pricescope/common.hpp"

namespace pricescope {

//! Ethereum Keccak-256 (original padding, not NIST SHA3-256).
Hash32 keccak256(const std::uint8_t* data, std::size_t size);
inline Hash32 keccak256(std::string_view text) {
    return keccak256(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

//! topic0 for an event signature such as "Transfer(address,address,uint256)".
inline Hash32 event_topic(std::string_view signature) { return keccak256(signature); }

//! First four bytes of keccak256(signature).
Selector function_selector(std::string_view signature);

}  // namespace pricescope
