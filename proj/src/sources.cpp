// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

#include "pricescope/sources.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pricescope/keccak.hpp"
#include "pricescope/trace.hpp"

namespace pricescope {

namespace fs = std::filesystem;
using nlohmann::json;

SourceBundle load_source_bundle(const fs::path& dir) {
    fs::path meta = dir / "metadata.json";
    if (!fs::exists(meta)) throw ParseError("bundle " + dir.string() + " has no metadata.json");
    json j = json::parse(read_file(meta), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(meta.string() + " is not a JSON object");
    if (!j.contains("verified") || !j["verified"].is_boolean()) {
        throw ParseError(meta.string() + ": 'verified' must be a boolean");
    }

    SourceBundle b;
    try {
        b.contract = Address::from_hex(j.contains("address") ? j["address"].get<std::string>()
                                                             : dir.filename().string());
        b.verified = j["verified"].get<bool>();
        for (const auto& t : j.value("tokens", json::array())) b.tokens.push_back(Address::from_hex(t.get<std::string>()));
    } catch (const json::exception& e) {
        throw ParseError(meta.string() + ": " + e.what());
    }
    if (!b.verified) return b;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() != "metadata.json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) b.files[f.filename().string()] = read_file(f);
    return b;
}

std::map<Address, SourceBundle> load_source_bundles(const fs::path& root) {
    std::map<Address, SourceBundle> out;
    if (!fs::is_directory(root)) return out;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory() || !fs::exists(entry.path() / "metadata.json")) continue;
        auto b = load_source_bundle(entry.path());
        out.insert_or_assign(b.contract, std::move(b));
    }
    return out;
}

const std::vector<std::string>& default_price_keywords() {
    static const std::vector<std::string> k = {"price",       "getPrice", "latestAnswer", "getReserves",
                                               "exchangeRate", "convertTo", "rate",        "oracle"};
    return k;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// Copy of `src` with comments and string literals blanked, offsets preserved.
std::string code_mask(const std::string& src) {
    std::string m = src;
    for (std::size_t i = 0; i < src.size();) {
        if (src.compare(i, 2, "//") == 0) {
            while (i < src.size() && src[i] != '\n') m[i++] = ' ';
        } else if (src.compare(i, 2, "/*") == 0) {
            std::size_t end = src.find("*/", i + 2);
            end = end == std::string::npos ? src.size() : end + 2;
            for (; i < end; ++i) {
                if (src[i] != '\n') m[i] = ' ';
            }
        } else if (src[i] == '"' || src[i] == '\'') {
            char q = src[i];
            m[i++] = ' ';
            while (i < src.size() && src[i] != q) {
                if (src[i] == '\\' && i + 1 < src.size()) m[i++] = ' ';
                m[i++] = ' ';
            }
            if (i < src.size()) m[i++] = ' ';
        } else {
            ++i;
        }
    }
    return m;
}

std::size_t match_close(const std::string& m, std::size_t open, char o, char c) {
    int depth = 0;
    for (std::size_t i = open; i < m.size(); ++i) {
        if (m[i] == o) ++depth;
        if (m[i] == c && --depth == 0) return i;
    }
    return std::string::npos;
}

struct FunctionDef {
    std::string name;
    std::string params;
    std::string text;
};

std::vector<FunctionDef> function_defs(const std::string& src) {
    std::string m = code_mask(src);
    std::vector<FunctionDef> out;
    const std::string kw = "function";
    std::size_t next = 0;
    for (std::size_t pos; (pos = m.find(kw, next)) != std::string::npos;) {
        next = pos + kw.size();
        if ((pos > 0 && ident_char(m[pos - 1])) || (pos + kw.size() < m.size() && ident_char(m[pos + kw.size()]))) {
            continue;
        }
        std::size_t i = pos + kw.size();
        while (i < m.size() && std::isspace(static_cast<unsigned char>(m[i]))) ++i;
        std::size_t nameStart = i;
        while (i < m.size() && ident_char(m[i])) ++i;
        std::string name = m.substr(nameStart, i - nameStart);
        while (i < m.size() && std::isspace(static_cast<unsigned char>(m[i]))) ++i;
        if (name.empty() || i >= m.size() || m[i] != '(') continue;
        std::size_t close = match_close(m, i, '(', ')');
        if (close == std::string::npos) break;
        std::string params = m.substr(i + 1, close - i - 1);

        // Skip modifiers and returns(...) up to the body or a bodiless ';'.
        std::size_t j = close + 1;
        while (j < m.size() && m[j] != '{' && m[j] != ';') {
            if (m[j] == '(') {
                j = match_close(m, j, '(', ')');
                if (j == std::string::npos) break;
            }
            ++j;
        }
        if (j == std::string::npos || j >= m.size() || m[j] == ';') continue;
        std::size_t end = match_close(m, j, '{', '}');
        if (end == std::string::npos) break;
        out.push_back({name, params, src.substr(pos, end + 1 - pos)});
        next = end + 1;
    }
    return out;
}

std::string canonical_type(std::string t) {
    if (t.rfind("uint", 0) == 0 && (t.size() == 4 || !std::isdigit(static_cast<unsigned char>(t[4])))) {
        t.insert(4, "256");
    } else if (t.rfind("int", 0) == 0 && (t.size() == 3 || !std::isdigit(static_cast<unsigned char>(t[3])))) {
        t.insert(3, "256");
    }
    return t;
}

}  // namespace

std::string canonical_signature(const std::string& name, const std::string& params) {
    std::string sig = name + "(";
    std::stringstream ss(params);
    std::string param;
    bool first = true;
    while (std::getline(ss, param, ',')) {
        std::istringstream words(param);
        std::string type;
        if (!(words >> type)) continue;
        if (!first) sig += ",";
        sig += canonical_type(type);
        first = false;
    }
    return sig + ")";
}

std::string extract_price_functions(const SourceBundle& bundle, const std::vector<std::string>& keywords) {
    if (!bundle.verified) throw NoSource("contract " + bundle.contract.hex() + " has no verified source");
    std::vector<std::string> names;
    std::set<std::string> selectors;
    for (const auto& k : keywords) {
        if (k.size() == 10 && k.rfind("0x", 0) == 0) {
            selectors.insert(lower(k));
        } else if (!k.empty()) {
            names.push_back(lower(k));
        }
    }

    std::string out;
    for (const auto& [file, src] : bundle.files) {
        for (const auto& f : function_defs(src)) {
            std::string lname = lower(f.name);
            bool hit = std::any_of(names.begin(), names.end(),
                                   [&](const std::string& k) { return lname.find(k) != std::string::npos; });
            if (!hit && !selectors.empty()) {
                hit = selectors.contains(function_selector(canonical_signature(f.name, f.params)).hex());
            }
            if (!hit) continue;
            if (!out.empty()) out += "\n\n";
            out += f.text;
        }
    }
    return out;
}

}  // namespace pricescope
