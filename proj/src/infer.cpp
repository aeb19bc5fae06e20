// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/infer.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace pricescope {

std::vector<TransferAction> segment_transfers(const std::vector<TransferGraph>& graphs, const Segment& s) {
    std::vector<TransferAction> out;
    for (const auto& g : graphs) {
        if (g.invocationIndex != s.invocation) continue;
        for (const auto& e : g.edges) {
            if (e.timeIndex >= s.span.first && e.timeIndex <= s.span.last) out.push_back(e.transfer);
        }
    }
    return out;
}

namespace {

std::set<Address> involved_contracts(const TransactionTrace& trace) {
    std::set<Address> out;
    for_each_frame(trace.entry, [&](const CallFrame& f) {
        out.insert(f.callee);
        for (const auto& l : f.logs) out.insert(l.address);
    });
    return out;
}

void push_unique(std::vector<Address>& v, const Address& a) {
    if (std::find(v.begin(), v.end(), a) == v.end()) v.push_back(a);
}

}  // namespace

std::vector<PromptJob> plan_prompts(const InferenceInput& in, const InferenceBackendConfig& cfg,
                                    const std::set<Address>& skip, std::vector<Warning>* warnings) {
    auto warn = [&](const std::string& code, const std::string& msg) {
        if (warnings) warnings->push_back({code, msg});
    };
    const FixtureContext& ctx = in.trace.context;
    bool type1 = cfg.kind == BackendKind::LlmTypeI || cfg.kind == BackendKind::Auto;
    bool type2 = cfg.kind == BackendKind::LlmTypeII || cfg.kind == BackendKind::Auto;
    const auto& keywords = cfg.keywords.empty() ? default_price_keywords() : cfg.keywords;

    // Snippets are per contract, not per segment.
    std::map<Address, std::string> snippets;
    if (type1) {
        auto involved = involved_contracts(in.trace);
        for (const auto& [addr, bundle] : in.bundles) {
            if (!bundle.verified || skip.contains(addr) || !involved.contains(addr)) continue;
            std::string code = extract_price_functions(bundle, keywords);
            if (code.empty()) {
                warn("NoPriceFunction", "no price function found in the source of " + addr.hex());
                continue;
            }
            snippets.emplace(addr, std::move(code));
        }
    }

    std::vector<PromptJob> jobs;
    for (std::size_t si = 0; si < in.segments.size(); ++si) {
        const Segment& seg = in.segments[si];
        auto transfers = segment_transfers(in.graphs, seg);
        auto deltas = compute_balance_deltas(transfers);
        auto changes = describe_changes(deltas, in.uc, ctx);
        if (changes.empty()) continue;
        VerdictAnchor anchor{seg.invocation, seg.span};

        auto held_by = [&](const Address& contract) {
            std::vector<Address> tokens;
            for (const auto& d : deltas) {
                if (d.account == contract && d.delta != 0) push_unique(tokens, d.token);
            }
            return tokens;
        };

        for (const auto& [addr, code] : snippets) {
            std::vector<Address> tokens = in.bundles.at(addr).tokens;
            for (const auto& t : held_by(addr)) push_unique(tokens, t);
            for (const auto& d : deltas) {
                if (d.token == addr && d.totalSupplyDelta && *d.totalSupplyDelta != 0) push_unique(tokens, addr);
            }
            if (tokens.empty()) continue;
            auto statements = generate_statements(tokens, {addr}, ctx);
            jobs.push_back({Backend::LlmTypeI, addr, si, anchor, statements,
                            build_prompt_type1(code, statements, changes)});
        }

        if (!type2) continue;
        std::set<Address> seen;
        for (const auto& label : in.pools) {
            if (label.labeledBy != OpKind::Swap || skip.contains(label.address) || snippets.contains(label.address)) {
                continue;
            }
            if (cfg.kind == BackendKind::Auto) {
                auto b = in.bundles.find(label.address);
                if (b != in.bundles.end() && b->second.verified) continue;
            }
            if (!seen.insert(label.address).second) continue;
            auto tokens = held_by(label.address);
            if (tokens.empty()) continue;
            try {
                auto statements = generate_statements(tokens, {label.address}, ctx);
                jobs.push_back({Backend::LlmTypeII, label.address, si, anchor, statements,
                                build_prompt_type2(label, tokens, statements, changes, ctx)});
            } catch (const NotTwoToken& e) {
                warn("NotTwoToken", e.what());
            }
        }
    }
    return jobs;
}

InferenceOutput infer_price_changes(const InferenceInput& in, const InferenceBackendConfig& cfg, LlmClient* client,
                                    std::optional<std::chrono::steady_clock::time_point> deadline) {
    InferenceOutput out;
    const FixtureContext& ctx = in.trace.context;
    auto expired = [&] { return deadline && std::chrono::steady_clock::now() >= *deadline; };

    std::set<Address> covered;
    if (cfg.kind == BackendKind::Analytic || cfg.kind == BackendKind::Auto) {
        try {
            AnalyticModel model(ctx);
            for (const auto& p : ctx.pools) covered.insert(p.address);
            for (const auto& o : ctx.oracles) covered.insert(o.contract);
            for (const auto& seg : in.segments) {
                if (expired()) {
                    out.timedOut = true;
                    break;
                }
                auto vs = model.step(segment_transfers(in.graphs, seg), {seg.invocation, seg.span}, &out.warnings);
                out.verdicts.insert(out.verdicts.end(), vs.begin(), vs.end());
            }
        } catch (const Error& e) {
            out.warnings.push_back({"AnalyticModel", e.what()});
        }
    }
    if (cfg.kind == BackendKind::Analytic || out.timedOut) return out;

    std::vector<PromptJob> jobs;
    try {
        jobs = plan_prompts(in, cfg, covered, &out.warnings);
    } catch (const Error& e) {
        out.warnings.push_back({"InferenceError", e.what()});
    }
    if (jobs.empty()) return out;

    std::unique_ptr<LlmClient> owned;
    if (!client) {
        if (!cfg.endpoint) {
            out.warnings.push_back({"BackendUnavailable", std::to_string(jobs.size()) +
                                                              " prompts skipped: no LLM endpoint configured"});
            return out;
        }
        owned = std::make_unique<HttpLlmClient>(cfg);
        client = owned.get();
    }

    std::vector<std::vector<PriceChangeVerdict>> results(jobs.size());
    std::vector<std::vector<Warning>> jobWarnings(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> late{false};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            if (expired()) {
                late = true;
                return;
            }
            const auto& job = jobs[i];
            try {
                auto scored = parse_scores(client->complete(job.prompt), job.statements, &jobWarnings[i]);
                results[i] = resolve_verdicts(scored, job.backend, job.anchor);
            } catch (const Error& e) {
                jobWarnings[i].push_back({"InferenceError", std::string(to_string(job.backend)) + " " +
                                                                job.contract.hex() + ": " + e.what()});
            }
        }
    };
    unsigned n = std::clamp<unsigned>(cfg.maxConcurrent, 1, static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    out.timedOut = late;

    auto clash = [&](const PriceChangeVerdict& v) {
        return std::any_of(out.verdicts.begin(), out.verdicts.end(), [&](const PriceChangeVerdict& a) {
            return a.backend == Backend::Analytic && a.token == v.token && a.contract == v.contract &&
                   a.anchor == v.anchor;
        });
    };
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        out.warnings.insert(out.warnings.end(), jobWarnings[i].begin(), jobWarnings[i].end());
        for (const auto& v : results[i]) {
            if (!clash(v)) out.verdicts.push_back(v);
        }
    }
    std::stable_sort(out.verdicts.begin(), out.verdicts.end(), [](const auto& a, const auto& b) {
        return std::tie(a.anchor.invocation, a.anchor.span.first) < std::tie(b.anchor.invocation, b.anchor.span.first);
    });
    return out;
}

}  // namespace pricescope
