#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tssrp/models.hpp"
#include "tssrp/numeric.hpp"
#include "tssrp/priors.hpp"
#include "tssrp/procedure.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {

/// Per-stream memory of the detector, in log space. log_r = -inf encodes R = 0.
struct LocalState {
    double log_r = kNegInf;
    double log_l = 0.0;
    friend bool operator==(const LocalState&, const LocalState&) = default;
};

/// Observed: R' = (R + 1) * LR, L' = L * LR. Unobserved: R' = R + 1, L' = L.
inline LocalState update_local(LocalState state, double log_lr, bool observed) {
    state.log_r = log1p_exp(state.log_r);
    if (observed) {
        state.log_r += log_lr;
        state.log_l += log_lr;
    }
    return state;
}

/// log(R + L * r_tilde); r_tilde = 0 returns log R unchanged.
inline double randomized_score(const LocalState& state, double r_tilde) {
    if (r_tilde == 0.0) return state.log_r;
    return log_add_exp(state.log_r, state.log_l + std::log(r_tilde));
}

enum class RuleKind {
    top_r_sum,                 // sum of the r largest R
    top_r_sum_randomized,      // sum of the r largest randomized scores
    top_r_log_sum,             // sum of the r largest log R
    top_r_log_sum_randomized,  // sum of the r largest log randomized scores
};

std::string to_string(RuleKind kind);
RuleKind parse_rule_kind(const std::string& name);
/// Short label used in reports: T, T2, T3, T4.
std::string rule_label(RuleKind kind);

/// Global stopping rule. Every kind alarms when its statistic reaches log(threshold).
struct StoppingRule {
    RuleKind kind = RuleKind::top_r_sum;
    std::size_t r = 1;
    double threshold = 1.0;  // A >= 0; A = 0 alarms at the first round
    friend bool operator==(const StoppingRule&, const StoppingRule&) = default;
};

/// Top-r combination of log-scale local values: log of the sum of the r
/// largest exponentials for the sum rules, plain sum of the r largest values
/// for the log-sum rules.
double top_r_combine(std::span<const double> log_values, std::size_t r, bool sum_of_logs);

/// Global statistic on the log scale, compared with log(A).
double global_statistic(std::span<const LocalState> states, std::span<const double> scores, RuleKind kind,
                        std::size_t r);

/// thompson: observe the q largest randomized scores (the detector proper).
/// uniform: a fresh uniformly random q-subset each round, for comparisons.
enum class LayoutPolicy { thompson, uniform };

struct DetectorConfig {
    std::size_t streams = 0;  // K
    std::size_t sensors = 0;  // q
    std::vector<StreamModel> models;
    PriorSpec prior;
    StoppingRule rule;
    std::uint64_t seed = 0;
    LayoutPolicy layout_policy = LayoutPolicy::thompson;

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

/// Thompson-sampling Shiryaev-Roberts detector. Each round: update local
/// statistics for the current layout, resample the randomisation values,
/// rank the randomized scores to pick the next layout, then evaluate the
/// stopping rule.
class TssrpDetector final : public MonitoringProcedure {
  public:
    explicit TssrpDetector(std::shared_ptr<const DetectorConfig> config)
        : TssrpDetector(config, config->seed, config->rule.threshold) {}
    /// Shares `config` but runs with its own seed and threshold.
    TssrpDetector(std::shared_ptr<const DetectorConfig> config, std::uint64_t seed, double threshold);
    explicit TssrpDetector(DetectorConfig config)
        : TssrpDetector(std::make_shared<const DetectorConfig>(std::move(config))) {}

    std::size_t streams() const override { return config_->streams; }
    const SensorLayout& layout() const override { return layout_; }
    StepOutcome step(std::span<const double> x) override;
    std::size_t time() const override { return time_; }
    bool stopped() const override { return stopped_; }
    double level() const override { return level_; }
    ThresholdScale scale() const override { return ThresholdScale::log; }
    std::vector<double> local_statistics() const override;
    std::span<const std::size_t> observation_counts() const override { return counts_; }

    std::span<const LocalState> states() const { return states_; }
    /// Randomized scores of the last round (log scale).
    std::span<const double> scores() const { return scores_; }
    double statistic() const { return stat_; }
    double threshold() const { return threshold_; }
    const DetectorConfig& config() const { return *config_; }

  private:
    std::shared_ptr<const DetectorConfig> config_;
    std::vector<LocalState> states_;
    std::vector<double> scores_;
    std::vector<std::size_t> counts_;
    SensorLayout layout_;
    Engine tie_rng_;
    Engine prior_rng_;
    std::size_t time_ = 0;
    double threshold_ = 0.0;
    double level_ = 0.0;
    double stat_ = kNegInf;
    bool stopped_ = false;
};

}  // namespace tssrp
