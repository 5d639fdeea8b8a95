// Output serialization: CSV tables with embedded provenance comments, JSON
// report mirrors, and per-run manifests. Formatting is fixed (shortest
// 17-significant-digit doubles, '\n' newlines) so reruns with identical
// inputs produce byte-identical files regardless of worker count.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reserveband/errors.hpp"
#include "reserveband/scenario.hpp"
#include "reserveband/version.hpp"

namespace reserveband {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Provenance block shared by all files of one run.
struct RunMeta {
    std::string command;
    std::string scenario_path;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double horizon = 0.0;
    std::string grid;  // human-readable grid note
};

inline void write_csv(const std::filesystem::path& file, const RunMeta& meta,
                      const CsvTable& table) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << "# reserveband " << kVersion << "\n";
    out << "# command: " << meta.command << "\n";
    out << "# scenario: " << meta.scenario_path << "\n";
    out << "# scenario_hash: " << meta.scenario_hash << "\n";
    out << "# seed: " << meta.seed << "\n";
    if (meta.n_paths > 0) out << "# n_paths: " << meta.n_paths << "\n";
    if (meta.dt > 0.0) out << "# dt: " << format_double(meta.dt) << "\n";
    if (meta.horizon > 0.0) out << "# horizon: " << format_double(meta.horizon) << "\n";
    if (!meta.grid.empty()) out << "# grid: " << meta.grid << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline Json meta_json(const RunMeta& meta) {
    Json j;
    j["artifact_version"] = kVersion;
    j["command"] = meta.command;
    j["scenario"] = meta.scenario_path;
    j["scenario_hash"] = meta.scenario_hash;
    j["seed"] = meta.seed;
    if (meta.n_paths > 0) j["n_paths"] = meta.n_paths;
    if (meta.dt > 0.0) j["dt"] = meta.dt;
    if (meta.horizon > 0.0) j["horizon"] = meta.horizon;
    if (!meta.grid.empty()) j["grid"] = meta.grid;
    return j;
}

inline void write_json(const std::filesystem::path& file, const Json& j) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << j.dump(2) << "\n";
}

inline void write_manifest(const std::filesystem::path& dir, const RunMeta& meta,
                           const std::vector<std::string>& outputs) {
    Json j = meta_json(meta);
    j["outputs"] = outputs;
    write_json(dir / (meta.command + "_manifest.json"), j);
}

inline RunMeta make_meta(const Scenario& s, const std::string& command) {
    RunMeta m;
    m.command = command;
    m.scenario_path = s.source_path;
    m.scenario_hash = s.source_hash;
    m.seed = s.seed;
    return m;
}

inline bool wants(const Scenario& s, const std::string& fmt) {
    for (const auto& f : s.formats)
        if (f == fmt) return true;
    return false;
}

}  // namespace reserveband
