#include "tssrp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tssrp/errors.hpp"

namespace tssrp {

std::string to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::top_r_sum: return "top_r_sum";
        case RuleKind::top_r_sum_randomized: return "top_r_sum_randomized";
        case RuleKind::top_r_log_sum: return "top_r_log_sum";
        case RuleKind::top_r_log_sum_randomized: return "top_r_log_sum_randomized";
    }
    return "?";
}

RuleKind parse_rule_kind(const std::string& name) {
    if (name == "top_r_sum" || name == "T" || name == "T1") return RuleKind::top_r_sum;
    if (name == "top_r_sum_randomized" || name == "T2") return RuleKind::top_r_sum_randomized;
    if (name == "top_r_log_sum" || name == "T3") return RuleKind::top_r_log_sum;
    if (name == "top_r_log_sum_randomized" || name == "T4") return RuleKind::top_r_log_sum_randomized;
    throw ConfigError("unknown stopping rule '" + name + "'");
}

std::string rule_label(RuleKind kind) {
    switch (kind) {
        case RuleKind::top_r_sum: return "T";
        case RuleKind::top_r_sum_randomized: return "T2";
        case RuleKind::top_r_log_sum: return "T3";
        case RuleKind::top_r_log_sum_randomized: return "T4";
    }
    return "?";
}

double top_r_combine(std::span<const double> log_values, std::size_t r, bool sum_of_logs) {
    if (r == 0 || r > log_values.size()) throw ConfigError("stopping rule needs 1 <= r <= K");
    std::vector<double> top(log_values.begin(), log_values.end());
    if (r < top.size())
        std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(r - 1), top.end(), std::greater<>());
    const std::span<const double> head(top.data(), r);
    if (!sum_of_logs) return log_sum_exp(head);
    double sum = 0.0;
    for (double v : head) sum += v;
    return sum;
}

double global_statistic(std::span<const LocalState> states, std::span<const double> scores, RuleKind kind,
                        std::size_t r) {
    const bool randomized = kind == RuleKind::top_r_sum_randomized || kind == RuleKind::top_r_log_sum_randomized;
    const bool logs = kind == RuleKind::top_r_log_sum || kind == RuleKind::top_r_log_sum_randomized;
    if (randomized) {
        if (scores.size() != states.size()) throw ConfigError("randomized rule needs one score per stream");
        return top_r_combine(scores, r, logs);
    }
    std::vector<double> log_r(states.size());
    std::transform(states.begin(), states.end(), log_r.begin(), [](const LocalState& s) { return s.log_r; });
    return top_r_combine(log_r, r, logs);
}

void DetectorConfig::validate() const {
    std::vector<std::string> problems;
    if (streams == 0) problems.emplace_back("K must be >= 1");
    if (sensors == 0) problems.emplace_back("q must be >= 1");
    if (sensors > streams)
        problems.push_back("q (" + std::to_string(sensors) + ") exceeds K (" + std::to_string(streams) + ")");
    if (rule.r == 0) problems.emplace_back("r must be >= 1");
    if (rule.r > streams)
        problems.push_back("r (" + std::to_string(rule.r) + ") exceeds K (" + std::to_string(streams) + ")");
    if (std::isnan(rule.threshold) || rule.threshold < 0.0) problems.emplace_back("threshold must be >= 0");
    if (models.size() != streams)
        problems.push_back("expected " + std::to_string(streams) + " stream models, got " +
                           std::to_string(models.size()));
    if (prior.size() != streams)
        problems.push_back("expected " + std::to_string(streams) + " prior descriptors, got " +
                           std::to_string(prior.size()));
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

TssrpDetector::TssrpDetector(std::shared_ptr<const DetectorConfig> config, std::uint64_t seed, double threshold)
    : config_(std::move(config)),
      tie_rng_(make_engine(derive_seed(seed, Purpose::TieBreak))),
      prior_rng_(make_engine(derive_seed(seed, Purpose::PriorDraw))),
      threshold_(threshold) {
    config_->validate();
    if (std::isnan(threshold) || threshold < 0.0) throw ConfigError("threshold must be >= 0");
    const std::size_t k = config_->streams;
    states_.assign(k, LocalState{});
    scores_.assign(k, kNegInf);
    counts_.assign(k, 0);
    layout_ = random_layout(k, config_->sensors, derive_seed(seed, Purpose::InitialLayout));
    level_ = threshold_to_level(ThresholdScale::log, threshold);
}

StepOutcome TssrpDetector::step(std::span<const double> x) {
    if (stopped_) throw StateError("step() called after the alarm was raised");
    const DetectorConfig& cfg = *config_;
    if (x.size() != cfg.streams) throw InputError("observation vector must have K entries");

    const auto observed = layout_.indicator();
    for (std::size_t k = 0; k < cfg.streams; ++k) {
        if (observed[k]) {
            states_[k] = update_local(states_[k], cfg.models[k].log_likelihood_ratio(x[k]), true);
            ++counts_[k];
        } else {
            states_[k] = update_local(states_[k], 0.0, false);
        }
    }
    for (std::size_t k = 0; k < cfg.streams; ++k)
        scores_[k] = randomized_score(states_[k], cfg.prior.draw(k, prior_rng_));
    if (cfg.layout_policy == LayoutPolicy::thompson)
        layout_ = select_layout(std::span<const double>(scores_), cfg.sensors, tie_rng_);
    else
        layout_ = random_layout(cfg.streams, cfg.sensors, tie_rng_());

    stat_ = global_statistic(states_, scores_, cfg.rule.kind, cfg.rule.r);
    ++time_;
    const bool alarm = stat_ >= level_;
    stopped_ = alarm;
    return {alarm, stat_};
}

std::vector<double> TssrpDetector::local_statistics() const {
    std::vector<double> out(states_.size());
    std::transform(states_.begin(), states_.end(), out.begin(), [](const LocalState& s) { return s.log_r; });
    return out;
}

}  // namespace tssrp
