#include "tssrp/procedure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tssrp/numeric.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {

SensorLayout::SensorLayout(std::vector<std::size_t> observed, std::size_t streams)
    : observed_(std::move(observed)), indicator_(streams, 0) {
    std::sort(observed_.begin(), observed_.end());
    for (std::size_t k : observed_) {
        if (k >= streams) throw ConfigError("layout index " + std::to_string(k + 1) + " outside 1..K");
        if (indicator_[k]) throw ConfigError("layout index " + std::to_string(k + 1) + " listed twice");
        indicator_[k] = 1;
    }
}

double threshold_to_level(ThresholdScale scale, double threshold) {
    return scale == ThresholdScale::log ? safe_log(threshold) : threshold;
}

double level_to_threshold(ThresholdScale scale, double level) {
    return scale == ThresholdScale::log ? std::exp(level) : level;
}

std::vector<double> RunResult::occupancy() const {
    std::vector<double> out(observation_counts.size(), 0.0);
    if (stop_time == 0) return out;
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = static_cast<double>(observation_counts[k]) / static_cast<double>(stop_time);
    return out;
}

SourceExhausted::SourceExhausted(std::size_t t, RunResult partial)
    : DataError("data source exhausted before round " + std::to_string(t)), partial_(std::move(partial)) {}

namespace {

void finish(const MonitoringProcedure& procedure, RunResult& result) {
    const auto counts = procedure.observation_counts();
    result.observation_counts.assign(counts.begin(), counts.end());
    result.final_local_statistics = procedure.local_statistics();
}

}  // namespace

RunResult run(MonitoringProcedure& procedure, DataSource& source, const RunOptions& options) {
    if (options.horizon == 0) throw ConfigError("horizon must be >= 1");
    if (procedure.stopped()) throw StateError("procedure already raised an alarm");

    RunResult result;
    std::vector<double> x(procedure.streams());
    while (true) {
        const std::size_t t = procedure.time() + 1;
        if (t > options.horizon) {
            result.stop_time = options.horizon;
            result.censored = true;
            break;
        }
        const SensorLayout& layout = procedure.layout();
        std::fill(x.begin(), x.end(), std::numeric_limits<double>::quiet_NaN());
        if (!source.next(t, layout.observed(), x)) {
            result.stop_time = t - 1;
            finish(procedure, result);
            throw SourceExhausted(t, std::move(result));
        }
        if (options.trace) result.layout_trace.push_back({t, {layout.observed().begin(), layout.observed().end()}});
        const StepOutcome outcome = procedure.step(x);
        result.final_stat = outcome.stat;
        if (options.trace) result.stat_trace.push_back({t, outcome.stat, procedure.level()});
        if (outcome.alarm) {
            result.stop_time = t;
            break;
        }
    }
    finish(procedure, result);
    return result;
}

SensorLayout random_layout(std::size_t streams, std::size_t q, std::uint64_t seed) {
    if (q == 0 || q > streams) throw ConfigError("layout size q must satisfy 1 <= q <= K");
    Engine rng = make_engine(seed);
    std::vector<std::size_t> pool(streams);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < q; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, streams - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(q);
    return SensorLayout(std::move(pool), streams);
}

}  // namespace tssrp
