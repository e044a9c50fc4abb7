#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tssrp/io/config.hpp"

namespace tssrp::io {

std::uint64_t fnv1a64(std::string_view data);

/// Identity of a run. Only inputs that change the outputs enter the hash;
/// timestamps, the command line and the worker count do not.
struct RunManifest {
    std::string hash;  // 16 hex digits
    std::uint64_t master_seed = 0;
    std::string version;
    std::string command;  // subcommand name
    std::vector<std::string> command_line;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
};

/// `options` holds output-affecting settings beyond the config (e.g. "threshold=12.5").
RunManifest make_manifest(const ExperimentConfig& config, std::uint64_t master_seed, const std::string& command,
                          const std::vector<std::string>& options);

std::string tool_version();
std::string utc_timestamp();

nlohmann::json to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace tssrp::io
