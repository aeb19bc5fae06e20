// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/detect.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace pricescope {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

const std::map<Address, SourceBundle>& no_bundles() {
    static const std::map<Address, SourceBundle> empty;
    return empty;
}

// Everything up to and including time segmentation.
struct Structure {
    DecodeResult decoded;
    UserControlledSet uc;
    std::vector<UserInvocation> invocations;
    std::vector<TransferGraph> graphs;
    std::vector<Segment> segments;
    bool stopped = false;
};

Structure analyze(const TransactionTrace& trace, const DetectConfig& cfg, Clock::time_point deadline,
                  DetectionReport& report) {
    Structure s;
    auto t = Clock::now();
    s.decoded = decode_transfers(trace);
    report.warnings.insert(report.warnings.end(), s.decoded.warnings.begin(), s.decoded.warnings.end());
    s.uc = identify_user_controlled(trace, cfg.uc, &report.warnings);
    s.invocations = slice_user_invocations(trace, s.uc, s.decoded.transfers);
    report.timings.decodeMs = ms_since(t);

    t = Clock::now();
    for (const auto& inv : s.invocations) {
        s.graphs.push_back(build_graph(inv, s.uc));
        if (cfg.dumpGraphs) report.graphs.push_back(to_dot(s.graphs.back(), trace.context));
    }
    report.timings.graphMs = ms_since(t);

    t = Clock::now();
    SearchLimits limits{cfg.maxPaths, deadline};
    std::set<Address> labeled;
    for (const auto& g : s.graphs) {
        try {
            auto r = recover_all(g, limits);
            report.operations.insert(report.operations.end(), r.operations.begin(), r.operations.end());
            for (const auto& p : r.pools) {
                if (labeled.insert(p.address).second) report.pools.push_back(p);
            }
        } catch (const SearchBudgetExceeded& e) {
            report.warnings.push_back({"TimeoutWarning", "invocation " + std::to_string(g.invocationIndex) +
                                                             ": operation recovery abandoned: " + e.what()});
            report.partial = true;
        } catch (const Timeout& e) {
            report.warnings.push_back({"TimeoutWarning", std::string("scan time cap reached during operation recovery: ") +
                                                             e.what()});
            report.partial = true;
            s.stopped = true;
            break;
        }
    }
    std::stable_sort(report.operations.begin(), report.operations.end(), [](const auto& a, const auto& b) {
        return std::tie(a.invocation, a.span.first) < std::tie(b.invocation, b.span.first);
    });
    s.segments = build_segments(s.graphs, report.operations);
    report.timings.recoverMs = ms_since(t);
    return s;
}

// Net user gains; debt tokens minted by borrows are liabilities and left out.
std::vector<ProfitEntry> user_profit(const Structure& s, const std::vector<DeFiOperation>& ops) {
    std::set<Address> debt;
    for (const auto& op : ops) {
        if (op.tokenDebt) debt.insert(*op.tokenDebt);
    }
    std::map<Address, BigInt> net;
    std::vector<Address> order;
    for (const auto& d : compute_balance_deltas(s.decoded.transfers)) {
        if (!s.uc.contains(d.account) || debt.contains(d.token)) continue;
        if (!net.contains(d.token)) order.push_back(d.token);
        net[d.token] += BigInt(d.delta);
    }
    std::vector<ProfitEntry> out;
    for (const auto& t : order) {
        if (net[t] > 0) out.push_back({t, net[t]});
    }
    return out;
}

}  // namespace

DetectionReport detect(const TransactionTrace& trace, const DetectConfig& cfg) {
    DetectionReport report;
    report.txHash = trace.txHash;
    auto deadline = Clock::now() + std::chrono::seconds(cfg.timeoutSecs);
    Structure s = analyze(trace, cfg, deadline, report);
    if (s.stopped) return report;

    auto t = Clock::now();
    InferenceInput in{trace, s.uc, s.graphs, report.pools, s.segments, cfg.bundles ? *cfg.bundles : no_bundles()};
    try {
        auto inferred = infer_price_changes(in, cfg.backend, cfg.client.get(), deadline);
        report.verdicts = std::move(inferred.verdicts);
        report.warnings.insert(report.warnings.end(), inferred.warnings.begin(), inferred.warnings.end());
        if (inferred.timedOut) {
            report.warnings.push_back({"TimeoutWarning", "scan time cap reached during price inference"});
            report.partial = true;
        }
    } catch (const Error& e) {
        report.warnings.push_back({"InferenceError", e.what()});
    }
    report.timings.inferMs = ms_since(t);

    t = Clock::now();
    report.findings = match_patterns(report.operations, report.verdicts, cfg.match, trace.context);
    report.timings.matchMs = ms_since(t);

    try {
        report.profit = user_profit(s, report.operations);
    } catch (const OverflowError& e) {
        report.warnings.push_back({"OverflowError", e.what()});
    }
    return report;
}

std::vector<PromptJob> collect_prompts(const TransactionTrace& trace, const DetectConfig& cfg) {
    DetectionReport scratch;
    Structure s = analyze(trace, cfg, Clock::now() + std::chrono::seconds(cfg.timeoutSecs), scratch);
    std::set<Address> skip;
    if (cfg.backend.kind == BackendKind::Auto) {
        for (const auto& p : trace.context.pools) skip.insert(p.address);
        for (const auto& o : trace.context.oracles) skip.insert(o.contract);
    }
    InferenceInput in{trace, s.uc, s.graphs, scratch.pools, s.segments, cfg.bundles ? *cfg.bundles : no_bundles()};
    return plan_prompts(in, cfg.backend, skip);
}

json to_json(const DetectionReport& r, const FixtureContext& ctx) {
    json j;
    j["txHash"] = r.txHash.hex();
    j["findings"] = json::array();
    for (const auto& f : r.findings) j["findings"].push_back(to_json(f));
    j["operations"] = json::array();
    for (const auto& op : r.operations) j["operations"].push_back(to_json(op));
    j["pools"] = json::array();
    for (const auto& p : r.pools) j["pools"].push_back({{"address", p.address.hex()}, {"labeledBy", to_string(p.labeledBy)}});
    j["verdicts"] = json::array();
    for (const auto& v : r.verdicts) {
        json jv = to_json(v);
        jv["statement"] = statement_text(ctx.token_name(v.token), ctx.contract_name(v.contract), v.direction);
        j["verdicts"].push_back(jv);
    }
    j["timings"] = {{"decodeMs", r.timings.decodeMs},
                    {"graphMs", r.timings.graphMs},
                    {"recoverMs", r.timings.recoverMs},
                    {"inferMs", r.timings.inferMs},
                    {"matchMs", r.timings.matchMs}};
    j["warnings"] = json::array();
    for (const auto& w : r.warnings) j["warnings"].push_back({{"code", w.code}, {"message", w.message}});
    if (!r.profit.empty()) {
        j["profit"] = json::array();
        for (const auto& p : r.profit) j["profit"].push_back({{"token", p.token.hex()}, {"amount", to_string(p.amount)}});
    }
    if (!r.graphs.empty()) j["graphs"] = r.graphs;
    j["partial"] = r.partial;
    return j;
}

std::vector<std::filesystem::path> list_fixtures(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

BatchSummary scan_batch(const std::vector<std::filesystem::path>& fixtures, const DetectConfig& cfg, unsigned jobs,
                        std::ostream& out) {
    BatchSummary summary;
    auto start = Clock::now();
    std::mutex mu;
    std::condition_variable turn;
    std::size_t nextToWrite = 0;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < fixtures.size();) {
            json line;
            bool failed = false, hit = false;
            try {
                auto trace = load_trace(fixtures[i]);
                auto report = detect(trace, cfg);
                line = to_json(report, trace.context);
                hit = !report.findings.empty();
            } catch (const std::exception& e) {
                line = {{"error", e.what()}};
                failed = true;
            }
            line["fixture"] = fixtures[i].string();
            std::string text = line.dump();
            std::unique_lock lock(mu);
            turn.wait(lock, [&] { return nextToWrite == i; });
            out << text << '\n';
            ++summary.scanned;
            summary.failed += failed;
            summary.withFindings += hit;
            ++nextToWrite;
            turn.notify_all();
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(fixtures.size(), 1))));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    out.flush();
    summary.totalMs = ms_since(start);
    return summary;
}

}  // namespace pricescope
