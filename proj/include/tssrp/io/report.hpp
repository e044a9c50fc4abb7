#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tssrp/calibration.hpp"
#include "tssrp/sim.hpp"

namespace tssrp::io {

nlohmann::json to_json(const CalibrationReport& report, const std::string& manifest_hash);
CalibrationReport calibration_from_json(const nlohmann::json& j);
/// threshold, arl, std_error, exact rows.
std::string bracket_csv(const CalibrationReport& report, const std::string& manifest_hash);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport experiment_from_json(const nlohmann::json& j);
/// One row per replication: replication, delay (-1 marks a false alarm).
std::string delays_csv(const ExperimentReport& report);

/// Mean delay (standard error) keyed by algorithm row and changed-count column.
struct DelayTable {
    double gamma = 0.0;
    std::vector<std::string> rows;        // algorithm labels
    std::vector<std::string> row_params;  // prior or delta per row
    std::vector<std::size_t> columns;     // n_changes, ascending
    std::vector<std::vector<std::optional<std::pair<double, double>>>> cells;
};

/// Throws DataError on mixed gamma or a duplicated (row, column) cell.
DelayTable build_table(const std::vector<ExperimentReport>& reports);
std::string render_table(const DelayTable& table);
/// algorithm,prior_or_delta,n_changes,mean_delay,stderr
std::string table_csv(const DelayTable& table);

/// Every experiment report (*.json with "kind": "experiment") under `dir`, sorted by file name.
std::vector<ExperimentReport> load_reports(const std::filesystem::path& dir);

}  // namespace tssrp::io
