#include "tssrp/io/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "tssrp/errors.hpp"

#ifndef TSSRP_VERSION
#define TSSRP_VERSION "0.0.0"
#endif

namespace tssrp::io {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string tool_version() { return TSSRP_VERSION; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const ExperimentConfig& config, std::uint64_t master_seed, const std::string& command,
                          const std::vector<std::string>& options) {
    ExperimentConfig canonical = config;
    canonical.calibration.workers = 0;
    std::string material = emit_config(canonical);
    material += "\n#seed=" + std::to_string(master_seed);
    material += "\n#version=" + tool_version();
    material += "\n#command=" + command;
    for (const auto& o : options) material += "\n#" + o;

    RunManifest m;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(material)));
    m.hash = hex;
    m.master_seed = master_seed;
    m.version = tool_version();
    m.command = command;
    return m;
}

nlohmann::json to_json(const RunManifest& m) {
    return {{"manifest_hash", m.hash}, {"master_seed", m.master_seed}, {"version", m.version},
            {"command", m.command},    {"command_line", m.command_line}, {"started", m.started},
            {"finished", m.finished},  {"outputs", m.outputs}};
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json(manifest).dump(2) << "\n";
}

}  // namespace tssrp::io
