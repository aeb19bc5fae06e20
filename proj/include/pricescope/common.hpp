// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pricescope {

namespace mp = boost::multiprecision;

//! Unsigned 256-bit token amount in base units. Overflow throws.
using U256 = mp::number<mp::cpp_int_backend<256, 256, mp::unsigned_magnitude, mp::checked, void>>;
//! Signed accumulator wide enough for (sum of u256 inflows) - (sum of u256 outflows).
using I257 = mp::number<mp::cpp_int_backend<257, 257, mp::signed_magnitude, mp::checked, void>>;
using BigInt = mp::cpp_int;
using Rational = mp::cpp_rational;

using TokenAmount = U256;
using Bytes = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define PRICESCOPE_ERROR(Name)                \
    class Name : public Error {               \
      public:                                 \
        using Error::Error;                   \
    }

PRICESCOPE_ERROR(ParseError);
PRICESCOPE_ERROR(VersionError);
PRICESCOPE_ERROR(NetworkError);
PRICESCOPE_ERROR(TxNotFound);
PRICESCOPE_ERROR(TracerUnsupported);
PRICESCOPE_ERROR(OverflowError);
PRICESCOPE_ERROR(SearchBudgetExceeded);
PRICESCOPE_ERROR(ZeroReserve);
PRICESCOPE_ERROR(InsufficientLiquidity);
PRICESCOPE_ERROR(NoConvergence);
PRICESCOPE_ERROR(TemplateError);
PRICESCOPE_ERROR(NoSource);
PRICESCOPE_ERROR(NotTwoToken);
PRICESCOPE_ERROR(UnparseableResponse);
PRICESCOPE_ERROR(RateLimited);
PRICESCOPE_ERROR(Timeout);
PRICESCOPE_ERROR(InvalidArgument);

#undef PRICESCOPE_ERROR

//! Non-fatal condition recorded during analysis ("MalformedLog", "TimeoutWarning", ...).
struct Warning {
    std::string code;
    std::string message;

    bool operator==(const Warning&) const = default;
};

// ---------------------------------------------------------------------------
// Hex helpers
// ---------------------------------------------------------------------------

//! Decodes "0x"-prefixed (or bare) hex. Throws ParseError on odd length or bad digits.
Bytes from_hex(std::string_view hex);
//! Lowercase, 0x-prefixed.
std::string to_hex(const std::uint8_t* data, std::size_t size);
inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

template <std::size_t N>
struct FixedBytes {
    std::array<std::uint8_t, N> bytes{};

    static FixedBytes from_hex(std::string_view hex) {
        Bytes raw = pricescope::from_hex(hex);
        if (raw.size() != N) {
            throw ParseError("expected " + std::to_string(N) + " bytes, got " + std::to_string(raw.size()) +
                             " in '" + std::string(hex) + "'");
        }
        FixedBytes out;
        std::copy(raw.begin(), raw.end(), out.bytes.begin());
        return out;
    }

    [[nodiscard]] std::string hex() const { return to_hex(bytes.data(), N); }
    [[nodiscard]] bool is_zero() const {
        for (auto b : bytes) {
            if (b != 0) return false;
        }
        return true;
    }

    auto operator<=>(const FixedBytes&) const = default;
};

using Hash32 = FixedBytes<32>;
using Selector = FixedBytes<4>;

//! 20-byte account address. Parsing is case-insensitive; rendering is lowercase.
struct Address : FixedBytes<20> {
    Address() = default;
    explicit Address(const FixedBytes<20>& b) : FixedBytes<20>(b) {}

    static Address from_hex(std::string_view hex) { return Address{FixedBytes<20>::from_hex(hex)}; }
    //! Low 20 bytes of a 32-byte word (ABI-encoded address).
    static Address from_word(const Hash32& word);

    //! "0x1234…abcd"
    [[nodiscard]] std::string short_hex() const;

    auto operator<=>(const Address&) const = default;
};

inline const Address kZeroAddress{};
extern const Address kDeadAddress;

//! Zero address or 0x…dEaD.
bool is_null_account(const Address& a);

enum class AccountKind { Eoa, Contract, Null };

// ---------------------------------------------------------------------------
// Numeric helpers
// ---------------------------------------------------------------------------

U256 u256_from_word(const std::uint8_t* word32);
U256 parse_u256(std::string_view text);  // decimal or 0x-hex
std::string to_string(const U256& v);
std::string to_string(const I257& v);
std::string to_string(const BigInt& v);
//! Converts an unbounded value to U256, throwing OverflowError if out of range.
U256 to_u256(const BigInt& v);

//! Renders |raw| / 10^decimals without trailing zeros ("1234.5", "0.001", "7").
std::string scale_decimal(const BigInt& raw, unsigned decimals);

//! Parses a decimal literal ("1.0002", "-3", "5e-3" not supported) to an exact rational.
Rational parse_decimal_rational(std::string_view text);

}  // namespace pricescope

template <std::size_t N>
struct std::hash<pricescope::FixedBytes<N>> {
    std::size_t operator()(const pricescope::FixedBytes<N>& b) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto c : b.bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
};

template <>
struct std::hash<pricescope::Address> {
    std::size_t operator()(const pricescope::Address& a) const noexcept {
        return std::hash<pricescope::FixedBytes<20>>{}(a);
    }
};
