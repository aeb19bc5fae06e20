// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/common.hpp"

#include <algorithm>
#include <cctype>

namespace pricescope {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

const Address kDeadAddress = Address::from_hex("0x000000000000000000000000000000000000dead");

Bytes from_hex(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_digit(hex[2 * i]);
        int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ParseError("invalid hex digit in '" + std::string(hex) + "'");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::string to_hex(const std::uint8_t* data, std::size_t size) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + 2 * size);
    for (std::size_t i = 0; i < size; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0xf]);
    }
    return out;
}

Address Address::from_word(const Hash32& word) {
    Address a;
    std::copy(word.bytes.begin() + 12, word.bytes.end(), a.bytes.begin());
    return a;
}

std::string Address::short_hex() const {
    std::string h = hex();
    return h.substr(0, 6) + "…" + h.substr(h.size() - 4);
}

bool is_null_account(const Address& a) { return a == kZeroAddress || a == kDeadAddress; }

U256 u256_from_word(const std::uint8_t* word32) {
    U256 v;
    mp::import_bits(v, word32, word32 + 32, 8, true);
    return v;
}

U256 parse_u256(std::string_view text) {
    if (text.empty()) throw ParseError("empty integer literal");
    BigInt v;
    try {
        if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
            Bytes raw = from_hex(text.size() % 2 ? "0" + std::string(text.substr(2)) : std::string(text));
            mp::import_bits(v, raw.begin(), raw.end(), 8, true);
        } else {
            if (!std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                throw ParseError("invalid decimal integer '" + std::string(text) + "'");
            }
            v = BigInt(std::string(text));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("invalid integer '" + std::string(text) + "': " + e.what());
    }
    return to_u256(v);
}

std::string to_string(const U256& v) { return v.str(); }
std::string to_string(const I257& v) { return v.str(); }
std::string to_string(const BigInt& v) { return v.str(); }

U256 to_u256(const BigInt& v) {
    static const BigInt kMax = (BigInt(1) << 256) - 1;
    if (v < 0 || v > kMax) throw OverflowError("value out of u256 range: " + v.str());
    return U256(v);
}

std::string scale_decimal(const BigInt& raw, unsigned decimals) {
    BigInt mag = raw < 0 ? BigInt(-raw) : raw;
    std::string digits = mag.str();
    if (decimals == 0) return digits;
    if (digits.size() <= decimals) digits.insert(0, decimals - digits.size() + 1, '0');
    std::string whole = digits.substr(0, digits.size() - decimals);
    std::string frac = digits.substr(digits.size() - decimals);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return frac.empty() ? whole : whole + "." + frac;
}

Rational parse_decimal_rational(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
        negative = text[0] == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string whole(text.substr(0, dot));
    std::string frac = dot == std::string_view::npos ? "" : std::string(text.substr(dot + 1));
    std::string all = whole + frac;
    if (all.empty() ||
        !std::all_of(all.begin(), all.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw ParseError("invalid decimal literal '" + std::string(text) + "'");
    }
    // cpp_int reads a leading zero as an octal prefix.
    auto nz = all.find_first_not_of('0');
    BigInt num(nz == std::string::npos ? std::string("0") : all.substr(nz));
    BigInt den = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    Rational r(num, den);
    return negative ? Rational(-r) : r;
}

}  // namespace pricescope
