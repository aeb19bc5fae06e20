// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// Python bindings. Amounts cross the boundary as decimal strings; the package wrapper
// turns them into ints and parses report JSON.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iomanip>
#include <sstream>

#include "pricescope/detect.hpp"
#include "pricescope/finetune.hpp"

namespace py = pybind11;
namespace ps = pricescope;

namespace {

// Placeholder token addresses for standalone pool math.
ps::Address slot(unsigned n) {
    std::ostringstream o;
    o << "0x" << std::hex << std::setw(40) << std::setfill('0') << n;
    return ps::Address::from_hex(o.str());
}

ps::DetectConfig make_config(const std::string& backend, const std::optional<std::string>& sources,
                             unsigned timeoutSecs, const std::optional<std::string>& endpoint) {
    ps::DetectConfig cfg;
    cfg.backend.kind = ps::backend_kind_from_string(backend);
    cfg.backend.endpoint = endpoint;
    cfg.timeoutSecs = timeoutSecs;
    if (sources) {
        cfg.backend.sourcesDir = *sources;
        cfg.bundles = std::make_shared<const std::map<ps::Address, ps::SourceBundle>>(ps::load_source_bundles(*sources));
    }
    return cfg;
}

std::string scan(const ps::TransactionTrace& trace, const ps::DetectConfig& cfg) {
    ps::DetectionReport report;
    {
        py::gil_scoped_release release;
        report = ps::detect(trace, cfg);
    }
    return ps::to_json(report, trace.context).dump();
}

std::pair<std::string, std::string> fraction(const ps::Rational& r) {
    return {ps::to_string(ps::BigInt(numerator(r))), ps::to_string(ps::BigInt(denominator(r)))};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "PriceScope core";

    py::register_exception<ps::Error>(m, "Error");

    m.def(
        "scan_fixture",
        [](const std::string& path, const std::string& backend, const std::optional<std::string>& sources,
           unsigned timeout, const std::optional<std::string>& endpoint) {
            return scan(ps::load_trace(path), make_config(backend, sources, timeout, endpoint));
        },
        py::arg("path"), py::arg("backend") = "analytic", py::arg("sources") = py::none(),
        py::arg("timeout") = ps::kDefaultTimeoutSecs, py::arg("endpoint") = py::none());

    m.def(
        "scan_trace_json",
        [](const std::string& text, const std::string& backend, const std::optional<std::string>& sources,
           unsigned timeout, const std::optional<std::string>& endpoint) {
            return scan(ps::trace_from_json(nlohmann::json::parse(text)), make_config(backend, sources, timeout, endpoint));
        },
        py::arg("text"), py::arg("backend") = "analytic", py::arg("sources") = py::none(),
        py::arg("timeout") = ps::kDefaultTimeoutSecs, py::arg("endpoint") = py::none());

    m.def(
        "cpmm_swap",
        [](const std::string& x, const std::string& y, std::uint32_t feeBps, bool inIsX, const std::string& amountIn) {
            ps::CpmmPool p{slot(1), slot(2), ps::parse_u256(x),
                           ps::parse_u256(y), feeBps};
            auto s = ps::cpmm_swap_exact_in(p, inIsX ? p.tokenX : p.tokenY, ps::parse_u256(amountIn));
            return py::make_tuple(ps::to_string(s.amountOut), ps::to_string(s.pool.reserveX),
                                  ps::to_string(s.pool.reserveY));
        },
        py::arg("reserve_x"), py::arg("reserve_y"), py::arg("fee_bps"), py::arg("x_in"), py::arg("amount_in"));

    m.def(
        "stableswap_d",
        [](const std::vector<std::string>& reserves, const std::string& amp, const std::string& ampPrecision) {
            ps::StableswapPool p;
            for (std::size_t i = 0; i < reserves.size(); ++i) {
                p.tokens.push_back(slot(static_cast<unsigned>(10 + i)));
                p.reserves.push_back(ps::parse_u256(reserves[i]));
            }
            p.amp = ps::parse_u256(amp);
            p.ampPrecision = ps::parse_u256(ampPrecision);
            return fraction(ps::stableswap_solve_D(p).value());
        },
        py::arg("reserves"), py::arg("amp"), py::arg("amp_precision") = "1");

    m.def(
        "synth_lines",
        [](std::size_t count, std::uint64_t seed, const std::string& lo, const std::string& hi) {
            auto pairs = ps::generate_finetune_pairs(ps::default_synthesis_pool(), count, seed, ps::parse_u256(lo),
                                                     ps::parse_u256(hi));
            const auto& tmpl = ps::default_template(ps::TemplateKind::Finetune);
            std::vector<std::string> lines;
            for (const auto& p : pairs) lines.push_back(ps::render_finetune_line(p, tmpl, ps::default_cpmm_snippet()));
            return lines;
        },
        py::arg("count"), py::arg("seed") = 0, py::arg("lo"), py::arg("hi"));

    m.def(
        "list_fixtures",
        [](const std::string& dir) {
            std::vector<std::string> out;
            for (const auto& p : ps::list_fixtures(dir)) out.push_back(p.string());
            return out;
        },
        py::arg("dir"));
}
