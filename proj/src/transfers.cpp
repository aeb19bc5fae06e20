// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/transfers.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "pricescope/keccak.hpp"

namespace pricescope {

std::string_view to_string(TransferKind k) {
    switch (k) {
        case TransferKind::Transferring: return "transfer";
        case TransferKind::Minting: return "mint";
        case TransferKind::Burning: return "burn";
    }
    return "transfer";
}

TransferKind classify_transfer(const Address& sender, const Address& receiver) {
    if (is_null_account(sender)) return TransferKind::Minting;
    if (is_null_account(receiver)) return TransferKind::Burning;
    return TransferKind::Transferring;
}

const Hash32& transfer_topic() {
    static const Hash32 topic = event_topic("Transfer(address,address,uint256)");
    return topic;
}

const Hash32& weth_deposit_topic() {
    static const Hash32 topic = event_topic("Deposit(address,uint256)");
    return topic;
}

const Hash32& weth_withdrawal_topic() {
    static const Hash32 topic = event_topic("Withdrawal(address,uint256)");
    return topic;
}

const std::vector<Address>& default_wrapped_native() {
    static const std::vector<Address> list = {
        Address::from_hex("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2"),  // WETH (Ethereum)
        Address::from_hex("0xbb4cdb9cbd36b01bd1cbaebf2de08d9173bc095c"),  // WBNB (BSC)
    };
    return list;
}

DecodeResult decode_transfers(const TransactionTrace& trace) {
    DecodeResult result;
    std::set<Address> wrapped(default_wrapped_native().begin(), default_wrapped_native().end());
    wrapped.insert(trace.context.wrappedNative.begin(), trace.context.wrappedNative.end());

    auto malformed = [&](std::size_t index, const std::string& why) {
        ++result.malformedLogs;
        result.warnings.push_back({"MalformedLog", "log " + std::to_string(index) + ": " + why});
    };

    for (const auto& emitted : emission_order(trace.entry)) {
        const LogRecord& log = *emitted.log;
        if (log.topics.empty()) continue;
        const Hash32& topic0 = log.topics.front();

        if (topic0 == transfer_topic()) {
            ++result.transferTopicLogs;
            if (log.topics.size() != 3) {
                malformed(emitted.index, "Transfer with " + std::to_string(log.topics.size()) + " topics");
                continue;
            }
            if (log.data.size() != 32) {
                malformed(emitted.index, "Transfer with " + std::to_string(log.data.size()) + " data bytes");
                continue;
            }
            Address from = Address::from_word(log.topics[1]);
            Address to = Address::from_word(log.topics[2]);
            if (is_null_account(from) && is_null_account(to)) {
                malformed(emitted.index, "Transfer between two null accounts");
                continue;
            }
            result.transfers.push_back({from, to, log.address, u256_from_word(log.data.data()),
                                        classify_transfer(from, to), emitted.index});
            continue;
        }

        bool deposit = topic0 == weth_deposit_topic();
        bool withdrawal = topic0 == weth_withdrawal_topic();
        if ((deposit || withdrawal) && wrapped.contains(log.address)) {
            if (log.topics.size() != 2 || log.data.size() != 32) {
                result.warnings.push_back(
                    {"MalformedLog", "log " + std::to_string(emitted.index) + ": wrapped-native event with wrong arity"});
                continue;
            }
            Address holder = Address::from_word(log.topics[1]);
            U256 amount = u256_from_word(log.data.data());
            if (deposit) {
                result.transfers.push_back(
                    {kZeroAddress, holder, log.address, amount, TransferKind::Minting, emitted.index});
            } else {
                result.transfers.push_back(
                    {holder, kZeroAddress, log.address, amount, TransferKind::Burning, emitted.index});
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Slicing
// ---------------------------------------------------------------------------

namespace {

bool opens_invocation(const CallFrame& f, const UserControlledSet& uc) {
    if (f.is_create()) return false;
    if (!uc.contains(f.caller) || uc.contains(f.callee) || is_null_account(f.callee)) return false;
    return f.selector.has_value() || !f.children.empty() || !f.logs.empty();
}

bool any_qualifying(const CallFrame& f, const UserControlledSet& uc) {
    if (opens_invocation(f, uc)) return true;
    return std::any_of(f.children.begin(), f.children.end(),
                       [&](const CallFrame& c) { return any_qualifying(c, uc); });
}

class Slicer : public ExecutionVisitor {
  public:
    Slicer(const UserControlledSet& uc, const std::unordered_map<std::size_t, const TransferAction*>& by_log)
        : uc_(uc), by_log_(by_log) {}

    void enter(const CallFrame& f) override {
        if (open_ == nullptr && opens_invocation(f, uc_)) {
            open_ = &f;
            start(&f, false);
        }
        bool protocol_call = !f.is_create() && uc_.contains(f.caller) && !uc_.contains(f.callee);
        invoked_.push_back(protocol_call ? std::optional<Address>(f.callee)
                                         : (invoked_.empty() ? std::nullopt : invoked_.back()));
    }

    void exit(const CallFrame& f) override {
        if (open_ == &f) open_ = nullptr;
        invoked_.pop_back();
    }

    void log(const CallFrame& f, const LogRecord&, std::size_t index) override {
        auto it = by_log_.find(index);
        if (it == by_log_.end()) return;
        if (open_ == nullptr) {
            bool reuse = !out.empty() && stray_.back() && out.back().rootFrame == &f;
            if (!reuse) start(&f, true);
        }
        auto& inv = out.back();
        inv.transfers.push_back({static_cast<std::uint32_t>(inv.transfers.size() + 1), *it->second,
                                 invoked_.empty() ? std::nullopt : invoked_.back()});
    }

    std::vector<UserInvocation> out;

  private:
    void start(const CallFrame* root, bool stray) {
        UserInvocation inv;
        inv.index = out.size();
        inv.rootFrame = root;
        out.push_back(std::move(inv));
        stray_.push_back(stray);
    }

    const UserControlledSet& uc_;
    const std::unordered_map<std::size_t, const TransferAction*>& by_log_;
    const CallFrame* open_ = nullptr;
    std::vector<bool> stray_;
    std::vector<std::optional<Address>> invoked_;
};

}  // namespace

std::vector<UserInvocation> slice_user_invocations(const TransactionTrace& trace, const UserControlledSet& uc,
                                                   std::span<const TransferAction> transfers) {
    if (!any_qualifying(trace.entry, uc)) {
        UserInvocation inv;
        inv.rootFrame = &trace.entry;
        std::uint32_t t = 0;
        for (const auto& tr : transfers) inv.transfers.push_back({++t, tr, std::nullopt});
        return {std::move(inv)};
    }
    std::unordered_map<std::size_t, const TransferAction*> by_log;
    for (const auto& tr : transfers) by_log[tr.logIndex] = &tr;
    Slicer slicer(uc, by_log);
    walk_execution(trace.entry, slicer);
    return std::move(slicer.out);
}

std::vector<UserInvocation> slice_user_invocations(const TransactionTrace& trace, const UserControlledSet& uc) {
    auto decoded = decode_transfers(trace);
    return slice_user_invocations(trace, uc, decoded.transfers);
}

// ---------------------------------------------------------------------------
// Balance deltas
// ---------------------------------------------------------------------------

std::vector<BalanceDelta> compute_balance_deltas(std::span<const TransferAction> transfers) {
    std::vector<BalanceDelta> out;
    std::map<std::pair<Address, Address>, std::size_t> slot;
    std::map<Address, I257> supply;

    auto entry = [&](const Address& account, const Address& token) -> BalanceDelta& {
        auto [it, inserted] = slot.try_emplace({account, token}, out.size());
        if (inserted) out.push_back({account, token, 0, std::nullopt});
        return out[it->second];
    };

    try {
        for (const auto& t : transfers) {
            I257 v(t.value);
            if (!is_null_account(t.sender)) entry(t.sender, t.token).delta -= v;
            if (!is_null_account(t.receiver)) entry(t.receiver, t.token).delta += v;
            if (t.kind == TransferKind::Minting) supply[t.token] += v;
            if (t.kind == TransferKind::Burning) supply[t.token] -= v;
        }
    } catch (const std::overflow_error& e) {
        throw OverflowError(std::string("balance delta overflow: ") + e.what());
    } catch (const std::range_error& e) {
        throw OverflowError(std::string("balance delta overflow: ") + e.what());
    }
    for (auto& d : out) {
        auto it = supply.find(d.token);
        if (it != supply.end()) d.totalSupplyDelta = it->second;
    }
    return out;
}

std::vector<BalanceDelta> compute_balance_deltas(const UserInvocation& inv) {
    std::vector<TransferAction> flat;
    flat.reserve(inv.transfers.size());
    for (const auto& t : inv.transfers) flat.push_back(t.action);
    return compute_balance_deltas(flat);
}

}  // namespace pricescope
