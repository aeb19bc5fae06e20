// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// pricescope: scan transactions for price manipulation, synthesize fine-tuning data,
// freeze RPC traces into fixtures, and render reports.
//
// Exit codes: 0 no findings, 2 findings, 1 fatal error, 64 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <toml.hpp>

#include "pricescope/detect.hpp"
#include "pricescope/finetune.hpp"
#include "pricescope/rpc.hpp"

namespace ps = pricescope;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFatal = 1;
constexpr int kExitFindings = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

// Values from pricescope.toml; flags and environment override them.
struct FileConfig {
    std::optional<std::string> rpc, backend, endpoint, model, sources, routers;
    std::optional<unsigned> timeout, jobs, minConfidence, llmTimeout, maxConcurrent;

    static FileConfig load(const std::filesystem::path& path, bool required) {
        FileConfig c;
        if (!std::filesystem::exists(path)) {
            if (required) throw UsageError("config file " + path.string() + " not found");
            return c;
        }
        toml::table t;
        try {
            t = toml::parse_file(path.string());
        } catch (const toml::parse_error& e) {
            throw UsageError(path.string() + ": " + std::string(e.description()));
        }
        auto str = [&](std::string_view key) -> std::optional<std::string> {
            if (auto v = t.at_path(key).value<std::string>()) return *v;
            return std::nullopt;
        };
        auto num = [&](std::string_view key) -> std::optional<unsigned> {
            if (auto v = t.at_path(key).value<int64_t>()) {
                if (*v < 0) throw UsageError(std::string(key) + " must be non-negative");
                return static_cast<unsigned>(*v);
            }
            return std::nullopt;
        };
        c.rpc = str("scan.rpc");
        c.backend = str("scan.backend");
        c.sources = str("scan.sources");
        c.routers = str("scan.routers");
        c.timeout = num("scan.timeout");
        c.jobs = num("scan.jobs");
        c.minConfidence = num("scan.min_confidence");
        c.endpoint = str("llm.endpoint");
        c.model = str("llm.model");
        c.llmTimeout = num("llm.timeout");
        c.maxConcurrent = num("llm.max_concurrent");
        return c;
    }
};

template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& envValue, const std::optional<T>& file, T fallback) {
    if (flag) return *flag;
    if (envValue) return *envValue;
    if (file) return *file;
    return fallback;
}

template <typename T>
std::optional<T> pick_opt(const std::optional<T>& flag, const std::optional<T>& envValue, const std::optional<T>& file) {
    if (flag) return flag;
    if (envValue) return envValue;
    return file;
}

// Options shared by scan and report.
struct PipelineFlags {
    std::optional<std::string> backend, endpoint, model, sources, routers, config;
    std::optional<unsigned> timeout, minConfidence;
    bool dumpGraph = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "analytic | llm-type1 | llm-type2 | auto (default analytic)");
        cmd->add_option("--llm-endpoint", endpoint, "chat-completions URL for the LLM backends");
        cmd->add_option("--llm-model", model, "model name sent to the LLM endpoint");
        cmd->add_option("--sources", sources, "directory of per-contract source bundles");
        cmd->add_option("--routers", routers, "JSON list of known router addresses");
        cmd->add_option("--timeout", timeout, "per-transaction scan cap in seconds (default 300)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--min-confidence", minConfidence, "lowest verdict score used for matching (default 6)")
            ->check(CLI::Range(1, 10));
        cmd->add_option("--config", config, "config file (default ./pricescope.toml if present)");
        cmd->add_flag("--dump-graph", dumpGraph, "include transfer graphs (DOT) in the report");
    }

    ps::DetectConfig build(const FileConfig& file) const {
        ps::DetectConfig cfg;
        std::string kind = pick<std::string>(backend, env("PRICESCOPE_BACKEND"), file.backend, "analytic");
        try {
            cfg.backend.kind = ps::backend_kind_from_string(kind);
        } catch (const ps::InvalidArgument& e) {
            throw UsageError(e.what());
        }
        cfg.backend.endpoint = pick_opt(endpoint, env("PRICESCOPE_LLM_ENDPOINT"), file.endpoint);
        if (auto m = pick_opt(model, env("PRICESCOPE_LLM_MODEL"), file.model)) cfg.backend.model = *m;
        if (file.llmTimeout) cfg.backend.timeoutSecs = *file.llmTimeout;
        if (file.maxConcurrent) cfg.backend.maxConcurrent = std::max(1u, *file.maxConcurrent);
        cfg.timeoutSecs = pick<unsigned>(timeout, std::nullopt, file.timeout, ps::kDefaultTimeoutSecs);
        if (cfg.timeoutSecs == 0) throw UsageError("timeout must be positive");
        cfg.match.minConfidence = static_cast<int>(pick<unsigned>(minConfidence, std::nullopt, file.minConfidence, 6));
        cfg.dumpGraphs = dumpGraph;
        if (auto dir = pick_opt(sources, env("PRICESCOPE_SOURCES"), file.sources)) {
            cfg.backend.sourcesDir = *dir;
            cfg.bundles = std::make_shared<const std::map<ps::Address, ps::SourceBundle>>(ps::load_source_bundles(*dir));
        }
        if (auto r = pick_opt<std::string>(routers, std::nullopt, file.routers)) cfg.uc.knownRouters = ps::load_address_list(*r);
        return cfg;
    }
};

FileConfig file_config(const std::optional<std::string>& path) {
    return FileConfig::load(path ? *path : "pricescope.toml", path.has_value());
}

void write_output(const std::optional<std::string>& out, const std::string& text) {
    if (out && *out != "-") {
        ps::write_file_atomic(*out, text);
    } else {
        std::cout << text;
        std::cout.flush();
    }
}

ps::TransactionTrace load_source(const std::optional<std::string>& fixture, const std::optional<std::string>& tx,
                                 const std::optional<std::string>& rpc) {
    if (fixture) return ps::load_trace(*fixture);
    if (!rpc) throw UsageError("--tx needs an RPC endpoint (--rpc, PRICESCOPE_RPC_URL or scan.rpc)");
    ps::Hash32 hash;
    try {
        hash = ps::Hash32::from_hex(*tx);
    } catch (const std::exception& e) {
        throw UsageError("--tx: " + std::string(e.what()));
    }
    return ps::fetch_trace(*rpc, hash);
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanCmd {
    PipelineFlags flags;
    std::optional<std::string> fixture, tx, rpc, batch, out;
    std::optional<unsigned> jobs;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("scan", "run detection on one transaction or a directory of fixtures");
        auto* f = cmd->add_option("--fixture", fixture, "fixture file")->check(CLI::ExistingFile);
        auto* t = cmd->add_option("--tx", tx, "transaction hash to fetch over RPC");
        auto* b = cmd->add_option("--batch", batch, "directory of fixtures; writes JSONL")->check(CLI::ExistingDirectory);
        f->excludes(t)->excludes(b);
        t->excludes(b);
        cmd->add_option("--rpc", rpc, "archive node URL (or PRICESCOPE_RPC_URL)");
        cmd->add_option("--jobs", jobs, "parallel transactions in batch mode (default: CPU count)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "report path (default stdout)");
        flags.add(cmd);
        cmd->callback([this] { ran = true; });
    }

    int run() {
        if (!fixture && !tx && !batch) throw UsageError("scan needs one of --fixture, --tx or --batch");
        FileConfig file = file_config(flags.config);
        ps::DetectConfig cfg = flags.build(file);
        if (batch) {
            unsigned n = pick<unsigned>(jobs, std::nullopt, file.jobs, std::max(1u, std::thread::hardware_concurrency()));
            std::ostringstream lines;
            auto summary = ps::scan_batch(ps::list_fixtures(*batch), cfg, n, lines);
            write_output(out, lines.str());
            std::cerr << "scanned " << summary.scanned << ", with findings " << summary.withFindings << ", failed "
                      << summary.failed << ", " << summary.totalMs << " ms\n";
            if (summary.failed > 0) return kExitFatal;
            return summary.withFindings > 0 ? kExitFindings : kExitClean;
        }
        auto trace = load_source(fixture, tx, pick_opt(rpc, env("PRICESCOPE_RPC_URL"), file.rpc));
        auto report = ps::detect(trace, cfg);
        write_output(out, ps::to_json(report, trace.context).dump(2) + "\n");
        return report.findings.empty() ? kExitClean : kExitFindings;
    }

    bool ran = false;
};

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

ps::U256 parse_amount(const std::string& text, unsigned decimals) {
    ps::Rational r;
    try {
        r = ps::parse_decimal_rational(text);
    } catch (const std::exception&) {
        throw UsageError("not a decimal amount: " + text);
    }
    ps::Rational scaled = r * ps::Rational(ps::BigInt(boost::multiprecision::pow(ps::BigInt(10), decimals)));
    if (denominator(scaled) != 1 || numerator(scaled) <= 0) {
        throw UsageError("amount must be positive with at most " + std::to_string(decimals) + " decimals: " + text);
    }
    return ps::to_u256(numerator(scaled));
}

struct SynthCmd {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string lo = "1", hi = "1000";
    std::optional<std::string> out, templatePath, codePath;
    std::optional<std::size_t> sample;
    bool split = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("synth", "generate CPMM fine-tuning pairs as chat-format JSONL");
        cmd->add_option("--count", count, "number of pairs, positive and even")->required();
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--lo", lo, "smallest swap amount in whole tokens (default 1)");
        cmd->add_option("--hi", hi, "largest swap amount in whole tokens (default 1000)");
        cmd->add_option("--out", out, "output JSONL (default stdout)");
        cmd->add_option("--template", templatePath, "fine-tuning template (default built in)")->check(CLI::ExistingFile);
        cmd->add_option("--code", codePath, "price model source (default built-in CPMM snippet)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--sample", sample, "keep a seeded sample of this many pairs");
        cmd->add_flag("--split", split, "write <out>.train.jsonl and <out>.valid.jsonl instead");
        cmd->callback([this] { ran = true; });
    }

    int run() {
        if (count == 0 || count % 2 != 0) throw UsageError("--count must be positive and even");
        if (split && !out) throw UsageError("--split needs --out");
        if (sample && (*sample == 0 || *sample > count)) throw UsageError("--sample must be in [1, count]");
        auto pool = ps::default_synthesis_pool();
        ps::U256 l = parse_amount(lo, 18), h = parse_amount(hi, 18);
        if (l >= h) throw UsageError("--lo must be below --hi");
        auto pairs = ps::generate_finetune_pairs(pool, count, seed, l, h);
        if (sample) pairs = ps::sample_pairs(pairs, *sample, seed);
        const ps::PromptTemplate tmpl = templatePath ? ps::PromptTemplate::load(*templatePath)
                                                     : ps::default_template(ps::TemplateKind::Finetune);
        const std::string code = codePath ? ps::read_file(*codePath) : ps::default_cpmm_snippet();
        if (split) {
            auto paths = ps::emit_finetune_split(pairs, tmpl, code, *out);
            std::cerr << "wrote " << paths.train.string() << " and " << paths.valid.string() << "\n";
        } else if (out && *out != "-") {
            ps::emit_finetune_jsonl(pairs, tmpl, code, *out);
        } else {
            for (const auto& p : pairs) std::cout << ps::render_finetune_line(p, tmpl, code) << "\n";
        }
        return kExitClean;
    }

    bool ran = false;
};

// ---------------------------------------------------------------------------
// freeze
// ---------------------------------------------------------------------------

struct FreezeCmd {
    std::string tx, out;
    std::optional<std::string> rpc, config;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("freeze", "fetch a transaction trace over RPC and save it as a fixture");
        cmd->add_option("--tx", tx, "transaction hash")->required();
        cmd->add_option("--out", out, "fixture path")->required();
        cmd->add_option("--rpc", rpc, "archive node URL (or PRICESCOPE_RPC_URL)");
        cmd->add_option("--config", config, "config file");
        cmd->callback([this] { ran = true; });
    }

    int run() {
        FileConfig file = file_config(config);
        auto trace = load_source(std::nullopt, tx, pick_opt(rpc, env("PRICESCOPE_RPC_URL"), file.rpc));
        ps::save_trace(trace, out);
        std::cerr << "froze " << trace.txHash.hex() << " to " << out << "\n";
        return kExitClean;
    }

    bool ran = false;
};

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

std::string human_report(const ps::DetectionReport& r, const ps::TransactionTrace& trace) {
    const auto& ctx = trace.context;
    std::ostringstream o;
    o << "transaction " << r.txHash.hex() << (r.partial ? " (partial)" : "") << "\n";
    o << "operations:\n";
    for (std::size_t i = 0; i < r.operations.size(); ++i) {
        const auto& op = r.operations[i];
        o << "  [" << i << "] " << ps::to_string(op.kind) << " invocation " << op.invocation << " T" << op.span.first
          << "-T" << op.span.last;
        for (const auto& c : op.contracts) o << " " << ctx.contract_name(c);
        o << "\n";
    }
    o << "price changes:\n";
    for (const auto& v : r.verdicts) {
        o << "  " << ps::statement_text(ctx.token_name(v.token), ctx.contract_name(v.contract), v.direction)
          << " (confidence " << v.confidence << ", " << ps::to_string(v.backend) << ")\n";
    }
    o << "findings: " << r.findings.size() << "\n";
    for (const auto& f : r.findings) o << "  " << f.narrative << "\n";
    for (const auto& w : r.warnings) o << "warning " << w.code << ": " << w.message << "\n";
    return o.str();
}

struct ReportCmd {
    PipelineFlags flags;
    std::optional<std::string> fixture, tx, rpc, out;
    bool prompts = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("report", "print a readable report, or the LLM prompts a scan would send");
        auto* f = cmd->add_option("--fixture", fixture, "fixture file")->check(CLI::ExistingFile);
        auto* t = cmd->add_option("--tx", tx, "transaction hash to fetch over RPC");
        f->excludes(t);
        cmd->add_option("--rpc", rpc, "archive node URL (or PRICESCOPE_RPC_URL)");
        cmd->add_option("--out", out, "output path (default stdout)");
        cmd->add_flag("--prompts", prompts, "render the planned Type-I/Type-II prompts instead of running inference");
        flags.add(cmd);
        cmd->callback([this] { ran = true; });
    }

    int run() {
        if (!fixture && !tx) throw UsageError("report needs --fixture or --tx");
        FileConfig file = file_config(flags.config);
        ps::DetectConfig cfg = flags.build(file);
        auto trace = load_source(fixture, tx, pick_opt(rpc, env("PRICESCOPE_RPC_URL"), file.rpc));
        if (prompts) {
            std::ostringstream o;
            for (const auto& job : ps::collect_prompts(trace, cfg)) {
                o << "### " << ps::to_string(job.backend) << " " << trace.context.contract_name(job.contract)
                  << " segment " << job.segment << " invocation " << job.anchor.invocation << " T"
                  << job.anchor.span.first << "-T" << job.anchor.span.last << "\n"
                  << job.prompt.text() << "\n";
            }
            write_output(out, o.str());
            return kExitClean;
        }
        auto report = ps::detect(trace, cfg);
        write_output(out, human_report(report, trace));
        return report.findings.empty() ? kExitClean : kExitFindings;
    }

    bool ran = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pricescope: price manipulation attack detection for DeFi transactions"};
    app.require_subcommand(1);
    ScanCmd scan;
    SynthCmd synth;
    FreezeCmd freeze;
    ReportCmd report;
    scan.add(app);
    synth.add(app);
    freeze.add(app);
    report.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitClean : kExitUsage;
    }

    try {
        if (scan.ran) return scan.run();
        if (synth.ran) return synth.run();
        if (freeze.ran) return freeze.run();
        if (report.ran) return report.run();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitUsage;
}
