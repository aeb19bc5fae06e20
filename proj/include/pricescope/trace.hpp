// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricescope/common.hpp"

namespace pricescope {

inline constexpr int kFixtureVersion = 1;

struct LogRecord {
    Address address;
    std::vector<Hash32> topics;
    Bytes data;
    //! Number of the enclosing frame's child calls that completed before this log was
    //! emitted (geth callTracer "position"). Unset means after all children.
    std::optional<std::uint32_t> position;

    bool operator==(const LogRecord&) const = default;
};

enum class CallType { Call, StaticCall, DelegateCall, CallCode, Create, Create2 };

std::string_view to_string(CallType t);
CallType call_type_from_string(std::string_view s);

struct CallFrame {
    CallType type = CallType::Call;
    Address caller;
    Address callee;
    //! Unset when the call carries no calldata (plain value transfer).
    std::optional<Selector> selector;
    std::uint32_t depth = 0;
    std::vector<CallFrame> children;
    std::vector<LogRecord> logs;

    [[nodiscard]] bool is_create() const { return type == CallType::Create || type == CallType::Create2; }

    bool operator==(const CallFrame&) const = default;
};

// ---------------------------------------------------------------------------
// Optional fixture context: token metadata, display labels and the price models
// the analytic backend evaluates. Never produced by RPC fetching.
// ---------------------------------------------------------------------------

struct TokenInfo {
    std::string symbol;
    std::optional<unsigned> decimals;

    bool operator==(const TokenInfo&) const = default;
};

enum class PoolModel { Cpmm, Stableswap };

struct PoolConfig {
    Address address;
    PoolModel model = PoolModel::Cpmm;
    std::vector<Address> tokens;
    std::vector<U256> reserves;  // balances before the transaction, same order as tokens
    std::uint32_t feeBps = 0;
    U256 amp = 0;
    U256 ampPrecision = 1;

    bool operator==(const PoolConfig&) const = default;
};

enum class OracleKind { Median, Spot };

struct OracleInput {
    Address pool;
    Address token;

    bool operator==(const OracleInput&) const = default;
};

//! A protocol-side price of `token` derived from pool spot prices (and constants).
struct OracleConfig {
    Address contract;
    Address token;
    OracleKind kind = OracleKind::Median;
    std::vector<OracleInput> inputs;
    std::vector<std::string> constants;  // decimal literals, e.g. EMA prices fixed within the block

    bool operator==(const OracleConfig&) const = default;
};

struct FixtureContext {
    std::map<Address, TokenInfo> tokens;
    std::map<Address, std::string> labels;
    std::vector<PoolConfig> pools;
    std::vector<OracleConfig> oracles;
    //! Wrapped native tokens whose Deposit/Withdrawal events count as mint/burn.
    std::vector<Address> wrappedNative;

    [[nodiscard]] bool empty() const {
        return tokens.empty() && labels.empty() && pools.empty() && oracles.empty() && wrappedNative.empty();
    }
    [[nodiscard]] std::string token_name(const Address& a) const;
    [[nodiscard]] std::string contract_name(const Address& a) const;

    bool operator==(const FixtureContext&) const = default;
};

struct TransactionTrace {
    Hash32 txHash;
    std::uint64_t chainId = 1;
    std::uint64_t blockNumber = 0;
    Address initiator;
    CallFrame entry;
    FixtureContext context;

    bool operator==(const TransactionTrace&) const = default;
};

// ---------------------------------------------------------------------------
// Fixture JSON
// ---------------------------------------------------------------------------

//! Throws ParseError on schema violations and VersionError on unsupported versions.
TransactionTrace trace_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const TransactionTrace& trace);

TransactionTrace load_trace(const std::filesystem::path& path);
//! Writes through a temporary file and renames it into place.
void save_trace(const TransactionTrace& trace, const std::filesystem::path& path);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Traversal
// ---------------------------------------------------------------------------

//! Pre-order walk over the call tree.
void for_each_frame(const CallFrame& root, const std::function<void(const CallFrame&)>& fn);

//! Callbacks for an execution-order walk: frames are entered in pre-order and each
//! log is reported between the child calls it was emitted between.
class ExecutionVisitor {
  public:
    virtual ~ExecutionVisitor() = default;
    virtual void enter(const CallFrame&) {}
    virtual void log(const CallFrame&, const LogRecord&, std::size_t /*index*/) {}
    virtual void exit(const CallFrame&) {}
};

void walk_execution(const CallFrame& entry, ExecutionVisitor& visitor);

struct EmittedLog {
    const CallFrame* frame;
    const LogRecord* log;
    std::size_t index;  // global emission index within the transaction
};

//! All logs in emission order, honoring per-log positions relative to child calls.
std::vector<EmittedLog> emission_order(const CallFrame& entry);

//! EOA / Contract / Null classification from what the trace reveals.
AccountKind account_kind(const TransactionTrace& trace, const Address& a);

}  // namespace pricescope
