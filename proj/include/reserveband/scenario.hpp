// Scenario files: a sectioned key = value text format.
//
// Every key is named after the field it sets; unknown sections or keys are
// hard errors so typos cannot silently fall back to defaults. A master seed
// is mandatory: no command ever draws entropy from the environment.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reserveband/errors.hpp"
#include "reserveband/model.hpp"
#include "reserveband/montecarlo.hpp"

namespace reserveband {

struct Scenario {
    MarketParams market{};
    CostModel costs{};
    double floor = 0.0;
    std::optional<double> band_override;  // [policy] b

    std::uint64_t seed = 0;
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    std::optional<double> horizon;  // default: derived from the tail cap
    double tail_cap = 1e-4;
    int workers = 1;

    std::vector<double> scan_factors = {0.8, 0.9, 1.0, 1.1, 1.25};

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};

    // provenance
    std::string source_path;
    std::string source_hash;  // fnv1a-64 of the raw file bytes, hex

    RunConfig run_config() const {
        RunConfig cfg;
        cfg.n_paths = n_paths;
        cfg.horizon = horizon.value_or(0.0);
        cfg.dt = dt;
        cfg.master_seed = seed;
        cfg.workers = workers;
        cfg.tail_cap = tail_cap;
        return cfg;
    }
};

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

namespace scenario_detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ScenarioError("bad numeric value '" + v + "' for " + where);
    }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ScenarioError("bad integer value '" + v + "' for " + where);
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace scenario_detail

inline Scenario parse_scenario_text(const std::string& text, const std::string& path = "") {
    using namespace scenario_detail;
    Scenario s;
    s.source_path = path;
    s.source_hash = to_hex(fnv1a64(text));

    bool seed_seen = false;
    std::vector<std::string> required = {"market.mu",    "market.sigma",     "market.x0",
                                         "costs.h",      "costs.alpha",      "costs.beta",
                                         "costs.n",      "costs.lambda",     "costs.lambda_bar",
                                         "policy.a",     "simulation.seed"};
    std::vector<std::string> seen;

    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string at = path + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioError(at + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "market" && section != "costs" && section != "policy" &&
                section != "simulation" && section != "scan" && section != "output")
                throw ScenarioError(at + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ScenarioError(at + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ScenarioError(at + ": key outside any section");
        const std::string full = section + "." + key;
        seen.push_back(full);

        if (full == "market.mu") s.market.mu = parse_double(value, full);
        else if (full == "market.sigma") s.market.sigma = parse_double(value, full);
        else if (full == "market.x0") s.market.x0 = parse_double(value, full);
        else if (full == "costs.h") s.costs.h = parse_double(value, full);
        else if (full == "costs.alpha") s.costs.alpha = parse_double(value, full);
        else if (full == "costs.beta") s.costs.beta = parse_double(value, full);
        else if (full == "costs.n") s.costs.n = parse_double(value, full);
        else if (full == "costs.lambda") s.costs.lambda = parse_double(value, full);
        else if (full == "costs.lambda_bar") s.costs.lambda_bar = parse_double(value, full);
        else if (full == "policy.a") s.floor = parse_double(value, full);
        else if (full == "policy.b") s.band_override = parse_double(value, full);
        else if (full == "simulation.seed") { s.seed = parse_u64(value, full); seed_seen = true; }
        else if (full == "simulation.n_paths")
            s.n_paths = static_cast<std::size_t>(parse_u64(value, full));
        else if (full == "simulation.dt") s.dt = parse_double(value, full);
        else if (full == "simulation.horizon") s.horizon = parse_double(value, full);
        else if (full == "simulation.tail_cap") s.tail_cap = parse_double(value, full);
        else if (full == "simulation.workers")
            s.workers = static_cast<int>(parse_u64(value, full));
        else if (full == "scan.b_factors") {
            s.scan_factors.clear();
            for (const auto& item : split_list(value))
                s.scan_factors.push_back(parse_double(item, full));
            if (s.scan_factors.empty()) throw ScenarioError(at + ": empty b_factors list");
        } else if (full == "output.dir") s.out_dir = value;
        else if (full == "output.formats") {
            s.formats = split_list(value);
            for (const auto& f : s.formats)
                if (f != "csv" && f != "json")
                    throw ScenarioError(at + ": unknown output format '" + f + "'");
        } else {
            throw ScenarioError(at + ": unknown key '" + full + "'");
        }
    }

    for (const auto& req : required) {
        bool found = false;
        for (const auto& got : seen)
            if (got == req) found = true;
        if (!found) throw ScenarioError(path + ": missing required key '" + req + "'");
    }
    if (!seed_seen) throw ScenarioError(path + ": a master seed is mandatory");
    if (s.n_paths == 0) throw ScenarioError(path + ": n_paths must be positive");
    if (s.workers < 1) throw ScenarioError(path + ": workers must be >= 1");
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str(), path);
}

}  // namespace reserveband
