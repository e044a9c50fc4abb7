#include "tssrp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "tssrp/errors.hpp"

namespace tssrp {

void TrasConfig::validate() const {
    std::vector<std::string> problems;
    if (streams == 0) problems.emplace_back("K must be >= 1");
    if (sensors == 0) problems.emplace_back("q must be >= 1");
    if (sensors > streams)
        problems.push_back("q (" + std::to_string(sensors) + ") exceeds K (" + std::to_string(streams) + ")");
    if (r == 0) problems.emplace_back("r must be >= 1");
    if (r > streams) problems.push_back("r (" + std::to_string(r) + ") exceeds K (" + std::to_string(streams) + ")");
    if (!std::isfinite(delta) || delta < 0.0) problems.emplace_back("delta must be a finite value >= 0");
    if (std::isnan(threshold) || threshold < 0.0) problems.emplace_back("threshold must be >= 0");
    if (models.size() != streams)
        problems.push_back("expected " + std::to_string(streams) + " stream models, got " +
                           std::to_string(models.size()));
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

TrasDetector::TrasDetector(std::shared_ptr<const TrasConfig> config, std::uint64_t seed, double threshold)
    : config_(std::move(config)), tie_rng_(make_engine(derive_seed(seed, Purpose::TieBreak))), threshold_(threshold) {
    config_->validate();
    if (std::isnan(threshold) || threshold < 0.0) throw ConfigError("threshold must be >= 0");
    w_.assign(config_->streams, 0.0);
    counts_.assign(config_->streams, 0);
    layout_ = random_layout(config_->streams, config_->sensors, derive_seed(seed, Purpose::InitialLayout));
}

StepOutcome TrasDetector::step(std::span<const double> x) {
    if (stopped_) throw StateError("step() called after the alarm was raised");
    const TrasConfig& cfg = *config_;
    if (x.size() != cfg.streams) throw InputError("observation vector must have K entries");

    const auto observed = layout_.indicator();
    for (std::size_t k = 0; k < cfg.streams; ++k) {
        if (observed[k]) {
            w_[k] = update_tras(w_[k], cfg.models[k].log_likelihood_ratio(x[k]), true, cfg.delta);
            ++counts_[k];
        } else {
            w_[k] = update_tras(w_[k], 0.0, false, cfg.delta);
        }
    }
    layout_ = select_layout(std::span<const double>(w_), cfg.sensors, tie_rng_);

    scratch_ = w_;
    if (cfg.r < scratch_.size())
        std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(cfg.r - 1), scratch_.end(),
                         std::greater<>());
    double stat = 0.0;
    for (std::size_t i = 0; i < cfg.r; ++i) stat += scratch_[i];

    ++time_;
    const bool alarm = stat >= threshold_;
    stopped_ = alarm;
    return {alarm, stat};
}

}  // namespace tssrp
