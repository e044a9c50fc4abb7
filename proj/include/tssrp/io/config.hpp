#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tssrp/calibration.hpp"
#include "tssrp/sim.hpp"

namespace tssrp::io {

/// Everything one config file describes: the scenario, the algorithm, an
/// optional fixed threshold and the calibration settings.
struct ExperimentConfig {
    Scenario scenario;
    AlgorithmSpec algorithm = TssrpSpec{};
    std::optional<double> threshold;  // A for TSSRP, a for TRAS
    CalibrationOptions calibration;   // gamma mirrors scenario.gamma

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI-style text with sections [scenario] [models] [prior] [rule]
/// [calibration] [network]. Throws ConfigError carrying every problem found,
/// each prefixed with its line number where one applies.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// Shortest decimal that reads back as the same double.
std::string format_number(double v);

/// Detector configuration for live monitoring (TSSRP only).
DetectorConfig detector_config(const ExperimentConfig& config, double threshold);

}  // namespace tssrp::io
