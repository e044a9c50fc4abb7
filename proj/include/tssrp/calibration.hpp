#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "tssrp/procedure.hpp"

namespace tssrp {

/// One in-control replication: a fresh procedure plus the data it consumes.
struct Replication {
    std::unique_ptr<MonitoringProcedure> procedure;
    std::unique_ptr<DataSource> source;
};

/// Builds replication `seed` at a given threshold. The data record and every
/// random choice must depend on the seed only, never on the threshold.
struct ReplicationFactory {
    ThresholdScale scale = ThresholdScale::log;
    std::size_t streams = 1;  // K, sets the initial bracket
    std::function<Replication(std::uint64_t seed, double threshold)> make;
};

struct ArlEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t censored = 0;
    std::size_t replications = 0;
    std::size_t horizon = 0;
    std::vector<std::size_t> stop_times;  // indexed by replication
};

/// Mean in-control stopping time over `reps` runs; censored runs count as the horizon.
ArlEstimate estimate_arl(const ReplicationFactory& factory, double threshold, std::size_t reps, std::size_t horizon,
                         std::uint64_t master_seed, std::size_t workers = 1);

struct CalibrationOptions {
    double gamma = 1000.0;
    std::size_t replications = 1000;
    std::size_t horizon = 0;  // 0 means 100 * gamma
    double rel_tol = 0.01;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    friend bool operator==(const CalibrationOptions&, const CalibrationOptions&) = default;
};

struct BracketPoint {
    double threshold = 0.0;
    double arl = 0.0;        // exact estimate, or a lower bound when !exact
    double std_error = 0.0;  // 0 for lower bounds
    bool exact = true;
    friend bool operator==(const BracketPoint&, const BracketPoint&) = default;
};

struct CalibrationReport {
    double gamma = 0.0;
    double threshold = 0.0;
    double level = 0.0;
    ThresholdScale scale = ThresholdScale::log;
    double arl_estimate = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
    std::size_t horizon = 0;
    std::size_t censored_count = 0;
    std::uint64_t seed = 0;
    std::vector<BracketPoint> bracket_history;
    friend bool operator==(const CalibrationReport&, const CalibrationReport&) = default;
};

/// Smallest threshold whose estimated ARL reaches gamma, by bisection on
/// log(threshold) over [1, 2 K gamma]. All candidates reuse the same
/// replications, so the estimate is exactly monotone in the threshold.
CalibrationReport calibrate_threshold(const ReplicationFactory& factory, const CalibrationOptions& options);

}  // namespace tssrp
