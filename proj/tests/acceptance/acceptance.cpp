// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any fail.

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "pricescope/detect.hpp"
#include "pricescope/finetune.hpp"
#include "support/cli.hpp"
#include "support/fixtures.hpp"
#include "support/stableswap_oracle.hpp"
#include "support/swap_oracle.hpp"

using namespace pricescope;
using namespace pricescope::testing;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failed(what);
}

double secs_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

DetectConfig analytic() {
    DetectConfig cfg;
    cfg.backend.kind = BackendKind::Analytic;
    return cfg;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

CliResult cli(const std::vector<std::string>& args) {
    return run_cli(args, {{"PRICESCOPE_BACKEND", ""}, {"PRICESCOPE_RPC_URL", ""}, {"PRICESCOPE_LLM_ENDPOINT", ""}},
                   PRICESCOPE_DATA_DIR);
}

// 1. CPMM price direction against y/x compared by cross-multiplication.
std::string cpmm_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> reserve(1'000, 1ull << 62);
    const Address X = addr(1), Y = addr(2);
    auto t0 = Clock::now();
    for (int i = 0; i < 1000; ++i) {
        CpmmPool before{X, Y, reserve(rng), reserve(rng), 30};
        bool inX = rng() % 2 == 0;
        U256 amount = std::uniform_int_distribution<std::uint64_t>(1, 1ull << 60)(rng);
        CpmmPool after = cpmm_swap_exact_in(before, inX ? X : Y, amount).pool;

        BigInt x0(before.reserveX), y0(before.reserveY), x1(after.reserveX), y1(after.reserveY);
        // price of X = y/x: compare y1*x0 with y0*x1.
        BigInt lhs = y1 * x0, rhs = y0 * x1;
        auto verdicts = analytic_infer(before, after);
        if (lhs == rhs) {
            require(verdicts.empty(), "swap " + std::to_string(i) + ": verdict without price move");
            continue;
        }
        Direction xDir = lhs > rhs ? Direction::Increase : Direction::Decrease;
        Direction yDir = lhs > rhs ? Direction::Decrease : Direction::Increase;
        require(verdicts.size() == 2, "swap " + std::to_string(i) + ": expected two verdicts");
        for (const auto& v : verdicts) {
            require(v.direction == (v.token == X ? xDir : yDir), "swap " + std::to_string(i) + ": wrong direction");
        }
    }
    double s = secs_since(t0);
    require(s < 1.0, "took " + std::to_string(s) + " s");
    return "1000 swaps in " + std::to_string(s) + " s";
}

// 2. Stableswap D: balanced pools, bisection agreement, residual.
std::string stableswap_oracle() {
    auto pool = [](std::vector<U256> r, unsigned amp) {
        StableswapPool p;
        for (std::size_t i = 0; i < r.size(); ++i) p.tokens.push_back(addr(10 + i));
        p.reserves = std::move(r);
        p.amp = amp;
        p.ampPrecision = 1;
        return p;
    };
    for (unsigned n : {2u, 3u, 4u}) {
        auto D = stableswap_solve_D(pool(std::vector<U256>(n, U256(1'000'000)), 100));
        require(D.value() == Rational(1'000'000 * static_cast<int>(n)), "balanced n=" + std::to_string(n));
    }
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pickN(2, 4);
    std::uniform_int_distribution<std::uint64_t> reserve(1, 1ull << 60);
    std::uniform_int_distribution<unsigned> amp(1, 5000);
    for (int i = 0; i < 500; ++i) {
        std::vector<U256> r(pickN(rng));
        for (auto& v : r) v = reserve(rng);
        auto p = pool(r, amp(rng));
        auto D = stableswap_solve_D(p);
        BigInt oracle = bisect_D(p);
        BigInt diff = D.scaled > oracle ? BigInt(D.scaled - oracle) : BigInt(oracle - D.scaled);
        require(diff <= 1, "pool " + std::to_string(i) + ": off the bisection grid point");
        require(stableswap_residual(p, D.value()) <= Rational(1, 10'000'000'000), "pool " + std::to_string(i) + ": residual");
    }
    return "n=2,3,4 balanced; 500 random pools within 1 grid step";
}

// 3. Router walk-through replay.
std::string router_walk_replay() {
    auto trace = load_trace(fixture_path("fig4.json"));
    auto r = detect(trace, analytic());
    require(r.operations.size() == 1 && r.operations[0].kind == OpKind::Swap, "expected exactly one swap");
    std::vector<std::string> path;
    for (const auto& c : r.operations[0].contracts) path.push_back(trace.context.contract_name(c));
    require(path == std::vector<std::string>{"CA1", "CA2", "CA3"}, "wrong swap path");
    std::set<std::string> labels;
    for (const auto& p : r.pools) labels.insert(trace.context.contract_name(p.address));
    require(labels == std::set<std::string>{"CA1", "CA2", "CA3"}, "wrong pool labels");
    return "UC -> CA1 -> CA2 -> CA3 -> UC";
}

// 4. Swap recovery against exhaustive subset enumeration.
std::string swap_recovery_oracle() {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        auto g = random_graph(rng, 12);
        std::set<std::vector<std::uint32_t>> got;
        auto swaps = recover_swaps(g).swaps;
        for (const auto& s : swaps) got.insert(s.edgeRefs);
        require(got.size() == swaps.size(), "graph " + std::to_string(i) + ": duplicate swap");
        require(got == brute_force_swaps(g), "graph " + std::to_string(i) + ": differs from enumeration");
    }
    return "200 random graphs";
}

// 5. Pattern suite through the CLI.
std::string pattern_suite() {
    for (const auto& name : pattern_names()) {
        auto r = cli({"scan", "--fixture", fixture_path("patterns/pattern_" + name + ".json").string(), "--backend",
                      "analytic"});
        require(r.code == 2, "pattern " + name + ": exit " + std::to_string(r.code));
        auto j = json::parse(r.out);
        require(j["findings"].size() == 1 && j["findings"][0]["pattern"] == name, "pattern " + name + ": findings");
    }
    for (const auto& name : benign_names()) {
        auto r = cli({"scan", "--fixture", fixture_path("benign/" + name + ".json").string(), "--backend", "analytic"});
        require(r.code == 0, name + ": exit " + std::to_string(r.code));
        require(json::parse(r.out)["findings"].empty(), name + ": findings");
    }
    return "8 attack fixtures, 8 benign fixtures";
}

// 6. Fine-tuning synthesis.
std::string synthesis() {
    auto a = cli({"synth", "--count", "1000", "--seed", "11"});
    auto b = cli({"synth", "--count", "1000", "--seed", "11"});
    require(a.code == 0 && b.code == 0, "synth failed");
    require(a.out == b.out, "output not byte-identical across runs");

    const U256 unit = U256(1'000'000'000'000'000'000ull);
    auto pairs = generate_finetune_pairs(default_synthesis_pool(), 1000, 11, unit, unit * 1000);
    std::size_t inflate = 0, deflate = 0;
    for (const auto& p : pairs) {
        require(p.deltaX != 0 && p.deltaY != 0 && (p.deltaX > 0) != (p.deltaY > 0), "deltas not of opposite sign");
        // Inflate: BTC20 swapped in, WETH paid out.
        require((p.direction == PriceDirection::Inflate) == (p.deltaX > 0), "direction disagrees with deltas");
        (p.direction == PriceDirection::Inflate ? inflate : deflate)++;
    }
    require(inflate == 500 && deflate == 500, "unbalanced directions");

    std::istringstream in(a.out);
    const auto tmpl = default_template(TemplateKind::Finetune);
    std::size_t i = 0;
    for (std::string line; std::getline(in, line); ++i) {
        require(i < pairs.size(), "too many lines");
        require(line == render_finetune_line(pairs[i], tmpl, default_cpmm_snippet()), "line " + std::to_string(i));
    }
    require(i == 1000, "expected 1000 lines");
    return "500 Inflate + 500 Deflate, reproducible";
}

// 7. Type-I prompt for the UwU Lend swap segment.
std::string uwulend_prompt() {
    auto r = cli({"report", "--fixture", fixture_path("uwulend.json").string(), "--prompts", "--backend", "llm-type1",
                  "--sources", fixture_path("bundles/uwulend").string()});
    require(r.code == 0, "exit " + std::to_string(r.code));
    require(r.out.find(read_file(golden_path("uwulend_type1_prompt.txt"))) != std::string::npos,
            "golden prompt not rendered");

    auto trace = load_trace(fixture_path("uwulend.json"));
    DetectConfig cfg;
    cfg.backend.kind = BackendKind::LlmTypeI;
    cfg.bundles = std::make_shared<const std::map<Address, SourceBundle>>(
        load_source_bundles(fixture_path("bundles/uwulend")));
    const PromptJob* job = nullptr;
    auto jobs = collect_prompts(trace, cfg);
    for (const auto& j : jobs) {
        if (j.contract == uwu_lending_pool() && j.anchor.span.first == 2) job = &j;
    }
    require(job != nullptr, "no prompt for the lending pool");
    const auto& user = job->prompt.user;
    require(user.find("The price of sUSDe in uwuLendingPool increases after change") != std::string::npos &&
                user.find("The price of sUSDe in uwuLendingPool decreases after change") != std::string::npos,
            "missing sUSDe statements");
    std::istringstream in(user);
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) lines += l.rfind("The balance of ", 0) == 0;
    require(lines == 10, "expected 10 balance lines, got " + std::to_string(lines));
    return "golden prompt, 2 statements, 10 balance lines";
}

// 8. Verdict resolution.
std::string verdict_resolution() {
    auto st = generate_statements(std::vector<Address>{addr(102)}, {addr(50)});
    require(st.size() == 2 && st[0].direction == Direction::Increase, "statement order");
    auto run = [&](int inc, int dec) { return resolve_verdicts({{st[0], inc}, {st[1], dec}}); };
    auto a = run(9, 2);
    require(a.size() == 1 && a[0].direction == Direction::Increase && a[0].confidence == 9, "(9,2)");
    require(run(5, 5).empty(), "(5,5)");
    auto c = run(3, 4);
    require(c.size() == 1 && c[0].direction == Direction::Decrease && c[0].confidence == 4, "(3,4)");
    return "(9,2) Increase@9, (5,5) none, (3,4) Decrease@4";
}

// 9. Batch throughput over 1000 benign transactions.
std::string throughput() {
    TempDir dir("pricescope_acceptance_batch");
    std::vector<json> sources;
    for (const auto& name : benign_names()) sources.push_back(json::parse(read_file(fixture_path("benign/" + name + ".json"))));
    for (std::size_t i = 0; i < 1000; ++i) {
        json j = sources[i % sources.size()];
        std::ostringstream hash;
        hash << "0x" << std::hex << std::setw(64) << std::setfill('0') << (i + 1);
        j["txHash"] = hash.str();
        std::ostringstream name;
        name << "tx_" << std::setw(4) << std::setfill('0') << i << ".json";
        std::ofstream(dir.path / name.str()) << j.dump();
    }
    auto files = list_fixtures(dir.path);
    require(files.size() == 1000, "fixture copies");
    std::ostringstream sink;
    auto summary = scan_batch(files, analytic(), 1, sink);
    require(summary.scanned == 1000 && summary.failed == 0, "scan errors");
    require(summary.withFindings == 0, "benign transactions flagged");
    double avg = summary.totalMs / 1000.0 / 1000.0;
    require(avg < 2.5, "average " + std::to_string(avg) + " s per transaction");
    std::ostringstream msg;
    msg << "1000 transactions, " << summary.totalMs / 1000.0 << " ms average";
    return msg.str();
}

// 10. Path explosion yields a partial report.
std::string pathological() {
    auto trace = load_trace(fixture_path("pathological.json"));
    auto t0 = Clock::now();
    auto r = detect(trace, analytic());
    double s = secs_since(t0);
    bool warned = std::any_of(r.warnings.begin(), r.warnings.end(), [](const Warning& w) { return w.code == "TimeoutWarning"; });
    require(r.partial && warned, "no partial report");
    require(s < 300.0, "took " + std::to_string(s) + " s");
    return "partial after " + std::to_string(s) + " s";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
        {"cpmm-oracle", cpmm_oracle},
        {"stableswap-oracle", stableswap_oracle},
        {"router-walk-replay", router_walk_replay},
        {"swap-recovery-oracle", swap_recovery_oracle},
        {"pattern-suite", pattern_suite},
        {"finetune-synthesis", synthesis},
        {"prompt-conformance", uwulend_prompt},
        {"verdict-resolution", verdict_resolution},
        {"throughput", throughput},
        {"pathological-timeout", pathological},
    };
    int failures = 0;
    int n = 0;
    for (const auto& [name, check] : criteria) {
        ++n;
        std::string detail;
        bool ok = false;
        try {
            detail = check();
            ok = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        failures += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << n << " " << name << ": " << detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
