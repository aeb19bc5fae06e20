// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/trace.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

namespace pricescope {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string require_string(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t require_uint(const json& j, const char* key) {
    const json& v = require(j, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_string()) {
        U256 x = parse_u256(v.get<std::string>());
        if (x > std::numeric_limits<std::uint64_t>::max()) throw ParseError(std::string("field '") + key + "' too large");
        return x.convert_to<std::uint64_t>();
    }
    throw ParseError(std::string("field '") + key + "' must be an unsigned integer");
}

LogRecord log_from_json(const json& j) {
    LogRecord log;
    log.address = Address::from_hex(require_string(j, "address"));
    const json& topics = require(j, "topics");
    if (!topics.is_array()) throw ParseError("'topics' must be an array");
    for (const auto& t : topics) {
        if (!t.is_string()) throw ParseError("topic must be a hex string");
        log.topics.push_back(Hash32::from_hex(t.get<std::string>()));
    }
    log.data = from_hex(require_string(j, "data"));
    if (j.contains("position")) log.position = static_cast<std::uint32_t>(require_uint(j, "position"));
    return log;
}

json log_to_json(const LogRecord& log) {
    json topics = json::array();
    for (const auto& t : log.topics) topics.push_back(t.hex());
    json j = {{"address", log.address.hex()}, {"topics", topics}, {"data", to_hex(log.data)}};
    if (log.position) j["position"] = *log.position;
    return j;
}

CallFrame frame_from_json(const json& j, std::uint32_t expected_depth) {
    if (!j.is_object()) throw ParseError("call frame must be an object");
    CallFrame f;
    if (j.contains("type")) f.type = call_type_from_string(require_string(j, "type"));
    f.caller = Address::from_hex(require_string(j, "caller"));
    f.callee = Address::from_hex(require_string(j, "callee"));
    std::string sel = require_string(j, "selector");
    if (sel != "0x" && !sel.empty()) f.selector = Selector::from_hex(sel);
    f.depth = static_cast<std::uint32_t>(require_uint(j, "depth"));
    if (f.depth != expected_depth) {
        throw ParseError("call depth " + std::to_string(f.depth) + " where " + std::to_string(expected_depth) +
                         " was expected");
    }
    if (j.contains("logs")) {
        const json& logs = j.at("logs");
        if (!logs.is_array()) throw ParseError("'logs' must be an array");
        for (const auto& l : logs) f.logs.push_back(log_from_json(l));
    }
    if (j.contains("children")) {
        const json& children = j.at("children");
        if (!children.is_array()) throw ParseError("'children' must be an array");
        for (const auto& c : children) f.children.push_back(frame_from_json(c, expected_depth + 1));
    }
    return f;
}

json frame_to_json(const CallFrame& f) {
    json logs = json::array();
    for (const auto& l : f.logs) logs.push_back(log_to_json(l));
    json children = json::array();
    for (const auto& c : f.children) children.push_back(frame_to_json(c));
    json j = {{"caller", f.caller.hex()},
              {"callee", f.callee.hex()},
              {"selector", f.selector ? f.selector->hex() : std::string("0x")},
              {"depth", f.depth},
              {"logs", logs},
              {"children", children}};
    if (f.type != CallType::Call) j["type"] = std::string(to_string(f.type));
    return j;
}

FixtureContext context_from_json(const json& j) {
    FixtureContext ctx;
    if (j.contains("tokens")) {
        for (const auto& [addr, info] : j.at("tokens").items()) {
            TokenInfo t;
            if (info.contains("symbol")) t.symbol = info.at("symbol").get<std::string>();
            if (info.contains("decimals")) {
                auto d = require_uint(info, "decimals");
                if (d > 255) throw ParseError("token decimals out of range");
                t.decimals = static_cast<unsigned>(d);
            }
            ctx.tokens[Address::from_hex(addr)] = t;
        }
    }
    if (j.contains("labels")) {
        for (const auto& [addr, name] : j.at("labels").items()) ctx.labels[Address::from_hex(addr)] = name.get<std::string>();
    }
    if (j.contains("pools")) {
        for (const auto& p : j.at("pools")) {
            PoolConfig pc;
            pc.address = Address::from_hex(require_string(p, "address"));
            std::string model = require_string(p, "model");
            if (model == "cpmm") {
                pc.model = PoolModel::Cpmm;
            } else if (model == "stableswap") {
                pc.model = PoolModel::Stableswap;
            } else {
                throw ParseError("unknown pool model '" + model + "'");
            }
            for (const auto& t : require(p, "tokens")) pc.tokens.push_back(Address::from_hex(t.get<std::string>()));
            for (const auto& r : require(p, "reserves")) pc.reserves.push_back(parse_u256(r.get<std::string>()));
            if (pc.tokens.size() != pc.reserves.size() || pc.tokens.size() < 2) {
                throw ParseError("pool " + pc.address.hex() + " needs matching tokens/reserves (>= 2)");
            }
            if (p.contains("feeBps")) pc.feeBps = static_cast<std::uint32_t>(require_uint(p, "feeBps"));
            if (p.contains("amp")) pc.amp = parse_u256(require_string(p, "amp"));
            if (p.contains("ampPrecision")) pc.ampPrecision = parse_u256(require_string(p, "ampPrecision"));
            ctx.pools.push_back(std::move(pc));
        }
    }
    if (j.contains("oracles")) {
        for (const auto& o : j.at("oracles")) {
            OracleConfig oc;
            oc.contract = Address::from_hex(require_string(o, "contract"));
            oc.token = Address::from_hex(require_string(o, "token"));
            std::string kind = require_string(o, "kind");
            if (kind == "median") {
                oc.kind = OracleKind::Median;
            } else if (kind == "spot") {
                oc.kind = OracleKind::Spot;
            } else {
                throw ParseError("unknown oracle kind '" + kind + "'");
            }
            for (const auto& in : require(o, "inputs")) {
                oc.inputs.push_back({Address::from_hex(require_string(in, "pool")),
                                     Address::from_hex(require_string(in, "token"))});
            }
            if (o.contains("constants")) {
                for (const auto& c : o.at("constants")) {
                    parse_decimal_rational(c.get<std::string>());
                    oc.constants.push_back(c.get<std::string>());
                }
            }
            ctx.oracles.push_back(std::move(oc));
        }
    }
    if (j.contains("wrappedNative")) {
        for (const auto& a : j.at("wrappedNative")) ctx.wrappedNative.push_back(Address::from_hex(a.get<std::string>()));
    }
    return ctx;
}

json context_to_json(const FixtureContext& ctx) {
    json j = json::object();
    if (!ctx.tokens.empty()) {
        json tokens = json::object();
        for (const auto& [addr, t] : ctx.tokens) {
            json info = {{"symbol", t.symbol}};
            if (t.decimals) info["decimals"] = *t.decimals;
            tokens[addr.hex()] = info;
        }
        j["tokens"] = tokens;
    }
    if (!ctx.labels.empty()) {
        json labels = json::object();
        for (const auto& [addr, name] : ctx.labels) labels[addr.hex()] = name;
        j["labels"] = labels;
    }
    if (!ctx.pools.empty()) {
        json pools = json::array();
        for (const auto& p : ctx.pools) {
            json tokens = json::array();
            json reserves = json::array();
            for (const auto& t : p.tokens) tokens.push_back(t.hex());
            for (const auto& r : p.reserves) reserves.push_back(to_string(r));
            json pj = {{"address", p.address.hex()},
                       {"model", p.model == PoolModel::Cpmm ? "cpmm" : "stableswap"},
                       {"tokens", tokens},
                       {"reserves", reserves},
                       {"feeBps", p.feeBps}};
            if (p.model == PoolModel::Stableswap) {
                pj["amp"] = to_string(p.amp);
                pj["ampPrecision"] = to_string(p.ampPrecision);
            }
            pools.push_back(pj);
        }
        j["pools"] = pools;
    }
    if (!ctx.oracles.empty()) {
        json oracles = json::array();
        for (const auto& o : ctx.oracles) {
            json inputs = json::array();
            for (const auto& in : o.inputs) inputs.push_back({{"pool", in.pool.hex()}, {"token", in.token.hex()}});
            oracles.push_back({{"contract", o.contract.hex()},
                               {"token", o.token.hex()},
                               {"kind", o.kind == OracleKind::Median ? "median" : "spot"},
                               {"inputs", inputs},
                               {"constants", o.constants}});
        }
        j["oracles"] = oracles;
    }
    if (!ctx.wrappedNative.empty()) {
        json wn = json::array();
        for (const auto& a : ctx.wrappedNative) wn.push_back(a.hex());
        j["wrappedNative"] = wn;
    }
    return j;
}

}  // namespace

std::string_view to_string(CallType t) {
    switch (t) {
        case CallType::Call: return "CALL";
        case CallType::StaticCall: return "STATICCALL";
        case CallType::DelegateCall: return "DELEGATECALL";
        case CallType::CallCode: return "CALLCODE";
        case CallType::Create: return "CREATE";
        case CallType::Create2: return "CREATE2";
    }
    return "CALL";
}

CallType call_type_from_string(std::string_view s) {
    std::string up(s);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "CALL") return CallType::Call;
    if (up == "STATICCALL") return CallType::StaticCall;
    if (up == "DELEGATECALL") return CallType::DelegateCall;
    if (up == "CALLCODE") return CallType::CallCode;
    if (up == "CREATE") return CallType::Create;
    if (up == "CREATE2") return CallType::Create2;
    throw ParseError("unknown call type '" + std::string(s) + "'");
}

std::string FixtureContext::token_name(const Address& a) const {
    auto it = tokens.find(a);
    if (it != tokens.end() && !it->second.symbol.empty()) return it->second.symbol;
    return a.short_hex();
}

std::string FixtureContext::contract_name(const Address& a) const {
    auto it = labels.find(a);
    if (it != labels.end()) return it->second;
    return a.short_hex();
}

TransactionTrace trace_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("fixture root must be an object");
    if (!j.contains("version")) throw ParseError("missing field 'version'");
    if (!j.at("version").is_number_integer()) throw ParseError("'version' must be an integer");
    if (j.at("version").get<int>() != kFixtureVersion) {
        throw VersionError("unsupported fixture version " + j.at("version").dump());
    }
    TransactionTrace t;
    try {
        t.txHash = Hash32::from_hex(require_string(j, "txHash"));
        t.chainId = require_uint(j, "chainId");
        t.blockNumber = require_uint(j, "blockNumber");
        t.initiator = Address::from_hex(require_string(j, "initiator"));
        const json& calls = require(j, "calls");
        if (!calls.is_array()) throw ParseError("'calls' must be an array");
        if (calls.size() > 1) throw ParseError("'calls' must hold at most one entry frame");
        if (calls.empty()) {
            t.entry.caller = t.initiator;
        } else {
            t.entry = frame_from_json(calls.front(), 0);
        }
        if (j.contains("context")) t.context = context_from_json(j.at("context"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("fixture schema violation: ") + e.what());
    }
    return t;
}

json trace_to_json(const TransactionTrace& t) {
    json j = {{"version", kFixtureVersion},
              {"txHash", t.txHash.hex()},
              {"chainId", t.chainId},
              {"blockNumber", t.blockNumber},
              {"initiator", t.initiator.hex()},
              {"calls", json::array({frame_to_json(t.entry)})}};
    if (!t.context.empty()) j["context"] = context_to_json(t.context);
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

TransactionTrace load_trace(const std::filesystem::path& path) {
    std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return trace_from_json(j);
}

void save_trace(const TransactionTrace& trace, const std::filesystem::path& path) {
    write_file_atomic(path, trace_to_json(trace).dump(2) + "\n");
}

void for_each_frame(const CallFrame& root, const std::function<void(const CallFrame&)>& fn) {
    fn(root);
    for (const auto& c : root.children) for_each_frame(c, fn);
}

namespace {

void walk_frame(const CallFrame& f, ExecutionVisitor& v, std::size_t& counter) {
    v.enter(f);
    std::size_t next_child = 0;
    for (const auto& log : f.logs) {
        std::size_t before = log.position ? std::min<std::size_t>(*log.position, f.children.size()) : f.children.size();
        while (next_child < before) walk_frame(f.children[next_child++], v, counter);
        v.log(f, log, counter++);
    }
    while (next_child < f.children.size()) walk_frame(f.children[next_child++], v, counter);
    v.exit(f);
}

class Collector : public ExecutionVisitor {
  public:
    std::vector<EmittedLog> out;
    void log(const CallFrame& f, const LogRecord& l, std::size_t index) override { out.push_back({&f, &l, index}); }
};

}  // namespace

void walk_execution(const CallFrame& entry, ExecutionVisitor& visitor) {
    std::size_t counter = 0;
    walk_frame(entry, visitor, counter);
}

std::vector<EmittedLog> emission_order(const CallFrame& entry) {
    Collector c;
    walk_execution(entry, c);
    return std::move(c.out);
}

AccountKind account_kind(const TransactionTrace& trace, const Address& a) {
    if (is_null_account(a)) return AccountKind::Null;
    bool contract = false;
    for_each_frame(trace.entry, [&](const CallFrame& f) {
        if (f.callee == a && (f.selector || f.is_create() || !f.children.empty() || !f.logs.empty())) contract = true;
        if (f.caller == a && f.depth > 0) contract = true;
        for (const auto& l : f.logs) {
            if (l.address == a) contract = true;
        }
    });
    return contract ? AccountKind::Contract : AccountKind::Eoa;
}

}  // namespace pricescope
