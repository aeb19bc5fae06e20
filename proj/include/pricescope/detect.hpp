// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricescope/graph.hpp"
#include "pricescope/infer.hpp"
#include "pricescope/patterns.hpp"

namespace pricescope {

inline constexpr unsigned kDefaultTimeoutSecs = 300;

struct DetectConfig {
    InferenceBackendConfig backend;
    MatchOptions match;
    UcOptions uc;
    std::size_t maxPaths = 1'000'000;
    unsigned timeoutSecs = kDefaultTimeoutSecs;
    bool dumpGraphs = false;
    //! Verified sources by contract; shared read-only across concurrent scans.
    std::shared_ptr<const std::map<Address, SourceBundle>> bundles;
    //! Overrides the HTTP client for LLM backends (tests, custom transports).
    std::shared_ptr<LlmClient> client;
};

struct StageTimings {
    double decodeMs = 0;
    double graphMs = 0;
    double recoverMs = 0;
    double inferMs = 0;
    double matchMs = 0;
};

//! A token the user-controlled accounts ended the transaction with more of.
struct ProfitEntry {
    Address token;
    BigInt amount;
};

struct DetectionReport {
    Hash32 txHash;
    std::vector<AttackFinding> findings;
    std::vector<DeFiOperation> operations;
    std::vector<PoolLabel> pools;
    std::vector<PriceChangeVerdict> verdicts;
    StageTimings timings;
    std::vector<Warning> warnings;
    std::vector<ProfitEntry> profit;
    //! DOT per invocation when DetectConfig::dumpGraphs is set.
    std::vector<std::string> graphs;
    //! True when a stage was cut short (TimeoutWarning present).
    bool partial = false;
};

//! Decode, identify the user-controlled set, slice, build graphs, recover operations, infer
//! price changes and match patterns. Only ingest-level problems throw; everything later
//! degrades to warnings. Past cfg.timeoutSecs (or the swap search budget) the report is
//! returned as is with a "TimeoutWarning".
DetectionReport detect(const TransactionTrace& trace, const DetectConfig& cfg = {});

nlohmann::json to_json(const DetectionReport& report, const FixtureContext& ctx = {});

//! Prompts the LLM backends would be sent for this trace (no network).
std::vector<PromptJob> collect_prompts(const TransactionTrace& trace, const DetectConfig& cfg);

struct BatchSummary {
    std::size_t scanned = 0;
    std::size_t withFindings = 0;
    std::size_t failed = 0;
    double totalMs = 0;
};

//! Scans each fixture with up to `jobs` workers and writes one JSON report per line, in
//! input order. Unloadable fixtures produce {"fixture", "error"} lines.
BatchSummary scan_batch(const std::vector<std::filesystem::path>& fixtures, const DetectConfig& cfg, unsigned jobs,
                        std::ostream& out);

//! *.json files under `dir`, sorted.
std::vector<std::filesystem::path> list_fixtures(const std::filesystem::path& dir);

}  // namespace pricescope
