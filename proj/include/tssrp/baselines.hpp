#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tssrp/models.hpp"
#include "tssrp/procedure.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {

/// CUSUM with compensation: observed max(w + llr, 0), unobserved w + delta.
inline double update_tras(double w, double log_lr, bool observed, double delta) {
    if (!observed) return w + delta;
    const double next = w + log_lr;
    return next > 0.0 ? next : 0.0;
}

struct TrasConfig {
    std::size_t streams = 0;
    std::size_t sensors = 0;
    std::size_t r = 1;
    double delta = 0.05;
    double threshold = 1.0;  // a, compared with the top-r sum of W
    std::vector<StreamModel> models;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Top-r adaptive sampling baseline: local CUSUMs, alarm on the sum of the r
/// largest, observe the q largest next round.
class TrasDetector final : public MonitoringProcedure {
  public:
    explicit TrasDetector(std::shared_ptr<const TrasConfig> config)
        : TrasDetector(config, config->seed, config->threshold) {}
    /// Shares `config` but runs with its own seed and threshold.
    TrasDetector(std::shared_ptr<const TrasConfig> config, std::uint64_t seed, double threshold);
    explicit TrasDetector(TrasConfig config) : TrasDetector(std::make_shared<const TrasConfig>(std::move(config))) {}

    std::size_t streams() const override { return config_->streams; }
    const SensorLayout& layout() const override { return layout_; }
    StepOutcome step(std::span<const double> x) override;
    std::size_t time() const override { return time_; }
    bool stopped() const override { return stopped_; }
    double level() const override { return threshold_; }
    ThresholdScale scale() const override { return ThresholdScale::linear; }
    std::vector<double> local_statistics() const override { return w_; }
    std::span<const std::size_t> observation_counts() const override { return counts_; }

    std::span<const double> w() const { return w_; }
    const TrasConfig& config() const { return *config_; }

  private:
    std::shared_ptr<const TrasConfig> config_;
    std::vector<double> w_;
    std::vector<std::size_t> counts_;
    std::vector<double> scratch_;
    SensorLayout layout_;
    Engine tie_rng_;
    double threshold_ = 0.0;
    std::size_t time_ = 0;
    bool stopped_ = false;
};

}  // namespace tssrp
