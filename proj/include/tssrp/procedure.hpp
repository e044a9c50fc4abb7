#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tssrp/errors.hpp"

namespace tssrp {

/// The q streams observed in one round, stored as sorted 0-based indices
/// with an indicator view over all K streams.
class SensorLayout {
  public:
    SensorLayout() = default;
    SensorLayout(std::vector<std::size_t> observed, std::size_t streams);

    std::span<const std::size_t> observed() const { return observed_; }
    bool contains(std::size_t k) const { return indicator_[k] != 0; }
    std::span<const unsigned char> indicator() const { return indicator_; }
    std::size_t q() const { return observed_.size(); }
    std::size_t streams() const { return indicator_.size(); }

    friend bool operator==(const SensorLayout&, const SensorLayout&) = default;

  private:
    std::vector<std::size_t> observed_;
    std::vector<unsigned char> indicator_;
};

struct StepOutcome {
    bool alarm = false;
    double stat = 0.0;
};

/// How a user-facing threshold maps onto the level the statistic is compared
/// against: `log` for Shiryaev-Roberts sums (level = log A), `linear` for
/// CUSUM sums (level = a).
enum class ThresholdScale { log, linear };

double threshold_to_level(ThresholdScale scale, double threshold);
double level_to_threshold(ThresholdScale scale, double level);

/// Common surface of every sequential procedure under sampling control.
/// Single-threaded; move it between workers, never share it.
class MonitoringProcedure {
  public:
    virtual ~MonitoringProcedure() = default;

    virtual std::size_t streams() const = 0;
    /// Layout to observe in the next round.
    virtual const SensorLayout& layout() const = 0;
    /// One round. Only entries of `x` listed in layout() are read.
    virtual StepOutcome step(std::span<const double> x) = 0;
    /// Rounds completed so far.
    virtual std::size_t time() const = 0;
    virtual bool stopped() const = 0;
    /// Alarm iff statistic >= level.
    virtual double level() const = 0;
    virtual ThresholdScale scale() const = 0;
    /// Per-stream local statistics on the same scale as the global statistic
    /// (log R for Shiryaev-Roberts type, W for CUSUM type).
    virtual std::vector<double> local_statistics() const = 0;
    /// Rounds in which each stream was observed.
    virtual std::span<const std::size_t> observation_counts() const = 0;
};

/// Supplies one round of observations. `out` has K slots; every index in
/// `requested` must be filled, the rest may be left untouched. Returns false
/// once exhausted.
class DataSource {
  public:
    virtual ~DataSource() = default;
    virtual bool next(std::size_t t, std::span<const std::size_t> requested, std::span<double> out) = 0;
};

struct RunOptions {
    std::size_t horizon = 1;
    bool trace = false;
};

struct StatPoint {
    std::size_t t = 0;
    double stat = 0.0;
    double level = 0.0;
    friend bool operator==(const StatPoint&, const StatPoint&) = default;
};

struct LayoutPoint {
    std::size_t t = 0;
    std::vector<std::size_t> observed;  // 0-based, sorted
    friend bool operator==(const LayoutPoint&, const LayoutPoint&) = default;
};

struct RunResult {
    std::size_t stop_time = 0;  // T, or the horizon when censored
    bool censored = false;
    double final_stat = 0.0;
    std::vector<std::size_t> observation_counts;
    std::vector<double> final_local_statistics;
    std::vector<StatPoint> stat_trace;      // filled when tracing
    std::vector<LayoutPoint> layout_trace;  // layout used in round t

    /// Observed fraction of rounds per stream.
    std::vector<double> occupancy() const;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

class SourceExhausted : public DataError {
  public:
    SourceExhausted(std::size_t t, RunResult partial);
    const RunResult& partial() const { return partial_; }

  private:
    RunResult partial_;
};

/// Steps `procedure` until alarm or `options.horizon` rounds.
RunResult run(MonitoringProcedure& procedure, DataSource& source, const RunOptions& options);

/// Uniformly random q-subset of {0..K-1}.
SensorLayout random_layout(std::size_t streams, std::size_t q, std::uint64_t seed);

/// The q largest scores; ties at the cut are broken uniformly at random.
template <class Rng>
SensorLayout select_layout(std::span<const double> scores, std::size_t q, Rng& rng);

}  // namespace tssrp

#include "tssrp/detail/select_layout.ipp"
