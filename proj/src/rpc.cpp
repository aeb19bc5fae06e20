// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/rpc.hpp"

#include <thread>

#include <httplib.h>

#include "pricescope/llm.hpp"

namespace pricescope {

using nlohmann::json;

namespace {

// JSON-RPC error reply, kept apart from transport failures.
struct RpcError : NetworkError {
    RpcError(long long c, const std::string& m) : NetworkError("RPC error " + std::to_string(c) + ": " + m), code(c), message(m) {}
    long long code;
    std::string message;
};

std::uint64_t quantity(const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (!v.is_string()) throw ParseError("expected a hex quantity");
    return std::stoull(v.get<std::string>(), nullptr, 16);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

json rpc_call(const std::string& endpoint, const std::string& method, const json& params, const RpcOptions& opts) {
    auto [base, path] = split_url(endpoint);
    httplib::Client cli(base);
    cli.set_connection_timeout(std::chrono::seconds(opts.timeoutSecs));
    cli.set_read_timeout(std::chrono::seconds(opts.timeoutSecs));
    std::string body = json{{"jsonrpc", "2.0"}, {"id", 1}, {"method", method}, {"params", params}}.dump();

    std::string last;
    for (unsigned attempt = 0; attempt <= opts.maxRetries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(opts.backoff * (1u << (attempt - 1)));
        auto res = cli.Post(path, body, "application/json");
        if (!res) {
            last = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last = "HTTP " + std::to_string(res->status);
            if (res->status == 429 || res->status >= 500) continue;
            break;
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object()) throw NetworkError(method + ": reply is not JSON-RPC");
        if (reply.contains("error") && !reply["error"].is_null()) {
            const json& e = reply["error"];
            throw RpcError(e.value("code", 0LL), e.value("message", std::string("unknown error")));
        }
        if (!reply.contains("result")) throw NetworkError(method + ": reply has no result");
        return reply["result"];
    }
    throw NetworkError(method + " to " + endpoint + " failed: " + last);
}

CallFrame frame_from_call_tracer(const json& call, std::uint32_t depth) {
    if (!call.is_object()) throw ParseError("callTracer frame must be an object");
    CallFrame f;
    std::string type = call.value("type", std::string("CALL"));
    f.type = lower(type) == "selfdestruct" ? CallType::Call : call_type_from_string(type);
    f.caller = Address::from_hex(call.at("from").get<std::string>());
    f.callee = call.contains("to") && call["to"].is_string() ? Address::from_hex(call["to"].get<std::string>())
                                                             : Address{};
    f.depth = depth;
    Bytes input = from_hex(call.value("input", std::string("0x")));
    if (input.size() >= 4 && !f.is_create()) {
        Selector s;
        std::copy(input.begin(), input.begin() + 4, s.bytes.begin());
        f.selector = s;
    }
    bool reverted = call.contains("error");
    if (!reverted && call.contains("logs")) {
        for (const auto& l : call["logs"]) {
            LogRecord log;
            log.address = Address::from_hex(l.at("address").get<std::string>());
            for (const auto& t : l.value("topics", json::array())) log.topics.push_back(Hash32::from_hex(t.get<std::string>()));
            log.data = from_hex(l.value("data", std::string("0x")));
            if (l.contains("position")) log.position = static_cast<std::uint32_t>(quantity(l["position"]));
            f.logs.push_back(std::move(log));
        }
    }
    for (const auto& c : call.value("calls", json::array())) f.children.push_back(frame_from_call_tracer(c, depth + 1));
    if (reverted) {
        // A reverted frame undoes everything below it.
        std::function<void(CallFrame&)> strip = [&](CallFrame& fr) {
            fr.logs.clear();
            for (auto& c : fr.children) strip(c);
        };
        strip(f);
    }
    return f;
}

TransactionTrace fetch_trace(const std::string& endpoint, const Hash32& txHash, const RpcOptions& opts) {
    const std::string hash = txHash.hex();
    json tx = rpc_call(endpoint, "eth_getTransactionByHash", json::array({hash}), opts);
    if (tx.is_null()) throw TxNotFound("transaction " + hash + " not found");
    if (tx.contains("blockNumber") && tx["blockNumber"].is_null()) throw TxNotFound("transaction " + hash + " is pending");

    json call;
    try {
        call = rpc_call(endpoint, "debug_traceTransaction",
                        json::array({hash, {{"tracer", "callTracer"}, {"tracerConfig", {{"withLog", true}}}}}), opts);
    } catch (const RpcError& e) {
        std::string m = lower(e.message);
        if (e.code == -32601 || m.find("tracer") != std::string::npos || m.find("not available") != std::string::npos ||
            m.find("does not exist") != std::string::npos) {
            throw TracerUnsupported("endpoint cannot run callTracer: " + e.message);
        }
        if (m.find("not found") != std::string::npos) throw TxNotFound("transaction " + hash + ": " + e.message);
        throw;
    }

    TransactionTrace t;
    try {
        t.txHash = txHash;
        t.chainId = quantity(rpc_call(endpoint, "eth_chainId", json::array(), opts));
        t.blockNumber = quantity(tx.at("blockNumber"));
        t.initiator = Address::from_hex(tx.at("from").get<std::string>());
        t.entry = frame_from_call_tracer(call, 0);
    } catch (const json::exception& e) {
        throw ParseError(std::string("unexpected RPC payload: ") + e.what());
    }
    return t;
}

}  // namespace pricescope
