// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pricescope/trace.hpp"

namespace pricescope {

enum class TransferKind { Transferring, Minting, Burning };

std::string_view to_string(TransferKind k);

//! One token movement <sender, receiver, token, value>.
struct TransferAction {
    Address sender;
    Address receiver;
    Address token;
    TokenAmount value = 0;
    TransferKind kind = TransferKind::Transferring;
    //! Emission index of the originating log within the transaction.
    std::size_t logIndex = 0;

    bool operator==(const TransferAction&) const = default;
};

//! Kind implied by the endpoints (sender Null => Minting, receiver Null => Burning).
TransferKind classify_transfer(const Address& sender, const Address& receiver);

//! topic0 of Transfer(address,address,uint256).
const Hash32& transfer_topic();
//! topic0 of WETH's Deposit(address,uint256) and Withdrawal(address,uint256).
const Hash32& weth_deposit_topic();
const Hash32& weth_withdrawal_topic();

//! Built-in wrapped native tokens (mainnet WETH, BSC WBNB).
const std::vector<Address>& default_wrapped_native();

struct DecodeResult {
    std::vector<TransferAction> transfers;  // emission order
    std::vector<Warning> warnings;
    std::size_t transferTopicLogs = 0;      // logs whose topic0 is the Transfer signature
    std::size_t malformedLogs = 0;
};

//! Decodes ERC-20 Transfer logs (and wrapped-native Deposit/Withdrawal as mint/burn).
//! Malformed Transfer logs are skipped with a "MalformedLog" warning.
DecodeResult decode_transfers(const TransactionTrace& trace);

// ---------------------------------------------------------------------------
// User invocations
// ---------------------------------------------------------------------------

struct UserControlledSet {
    std::set<Address> accounts;

    [[nodiscard]] bool contains(const Address& a) const { return accounts.contains(a); }
    bool operator==(const UserControlledSet&) const = default;
};

struct TimedTransfer {
    std::uint32_t timeIndex = 0;  // 1..n within the invocation
    TransferAction action;
    //! Callee of the innermost call from a user-controlled account into another contract
    //! that encloses the log; unset when no such call does.
    std::optional<Address> invoked;

    bool operator==(const TimedTransfer&) const = default;
};

struct UserInvocation {
    std::size_t index = 0;
    const CallFrame* rootFrame = nullptr;  // points into the sliced trace
    std::vector<TimedTransfer> transfers;
};

//! Splits the trace at the outermost calls from user-controlled accounts into other
//! contracts. Transfers go to the invocation whose frame encloses their log; logs emitted
//! by user-controlled frames outside every invocation form their own invocation rooted at
//! the emitting frame. With no qualifying call, one invocation spans the entry frame.
std::vector<UserInvocation> slice_user_invocations(const TransactionTrace& trace, const UserControlledSet& uc,
                                                   std::span<const TransferAction> transfers);
std::vector<UserInvocation> slice_user_invocations(const TransactionTrace& trace, const UserControlledSet& uc);

// ---------------------------------------------------------------------------
// Balance deltas
// ---------------------------------------------------------------------------

struct BalanceDelta {
    Address account;
    Address token;
    I257 delta = 0;
    //! Mints minus burns of `token`, present when the token was minted or burned.
    std::optional<I257> totalSupplyDelta;

    bool operator==(const BalanceDelta&) const = default;
};

//! One entry per (account, token) touched, in order of first touch. Null endpoints get no
//! entry. Throws OverflowError when a running sum leaves the signed 257-bit range.
std::vector<BalanceDelta> compute_balance_deltas(std::span<const TransferAction> transfers);
std::vector<BalanceDelta> compute_balance_deltas(const UserInvocation& inv);

}  // namespace pricescope
