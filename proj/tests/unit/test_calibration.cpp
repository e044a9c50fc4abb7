#include <doctest.h>

#include <cmath>
#include <memory>

#include "tssrp/calibration.hpp"
#include "tssrp/errors.hpp"
#include "tssrp/sim.hpp"

using namespace tssrp;

namespace {

// Statistic = round index + offset on the linear scale.
class Counter final : public MonitoringProcedure {
  public:
    Counter(double threshold, double offset) : level_(threshold), offset_(offset), layout_({0}, 1) {}
    std::size_t streams() const override { return 1; }
    const SensorLayout& layout() const override { return layout_; }
    StepOutcome step(std::span<const double>) override {
        ++time_;
        const double stat = double(time_) + offset_;
        stopped_ = stat >= level_;
        return {stopped_, stat};
    }
    std::size_t time() const override { return time_; }
    bool stopped() const override { return stopped_; }
    double level() const override { return level_; }
    ThresholdScale scale() const override { return ThresholdScale::linear; }
    std::vector<double> local_statistics() const override { return {double(time_) + offset_}; }
    std::span<const std::size_t> observation_counts() const override { return counts_; }

  private:
    double level_;
    double offset_;
    SensorLayout layout_;
    std::vector<std::size_t> counts_{0};
    std::size_t time_ = 0;
    bool stopped_ = false;
};

class Zeros final : public DataSource {
  public:
    bool next(std::size_t, std::span<const std::size_t>, std::span<double> out) override {
        out[0] = 0.0;
        return true;
    }
};

ReplicationFactory counter_factory(double offset) {
    ReplicationFactory f;
    f.scale = ThresholdScale::linear;
    f.streams = 1;
    f.make = [offset](std::uint64_t, double threshold) {
        return Replication{std::make_unique<Counter>(threshold, offset), std::make_unique<Zeros>()};
    };
    return f;
}

Scenario small_scenario() {
    Scenario s;
    s.streams = 5;
    s.sensors = 2;
    s.r = 2;
    s.gamma = 50;
    s.change_time = std::nullopt;
    s.detector_models.assign(5, StreamModel::gaussian(0.0, 1.5));
    s.truth_models = s.detector_models;
    s.replications = 1;
    return s;
}

AlgorithmSpec g2(std::size_t k) {
    TssrpSpec t;
    t.prior = PriorSpec::preset(PriorPreset::G2, k);
    return t;
}

}  // namespace

TEST_CASE("deterministic statistic calibrates exactly") {
    CalibrationOptions o;
    o.gamma = 100;
    o.replications = 10;
    o.rel_tol = 1e-3;
    const auto rep = calibrate_threshold(counter_factory(0.0), o);
    CHECK(rep.threshold == 100.0);
    CHECK(rep.arl_estimate == 100.0);
    CHECK(rep.std_error == 0.0);
    CHECK(rep.bracket_history.back().threshold == rep.threshold);
}

TEST_CASE("a statistic that never alarms fails calibration") {
    CalibrationOptions o;
    o.gamma = 100;
    o.replications = 5;
    o.horizon = 1000;
    CHECK_THROWS_AS(calibrate_threshold(counter_factory(-1e12), o), CalibrationError);
}

TEST_CASE("estimate_arl edge cases") {
    const auto f = in_control_factory(small_scenario(), g2(5));
    const auto zero = estimate_arl(f, 0.0, 20, 100, 3);
    CHECK(zero.mean == 1.0);
    CHECK(zero.std_error == 0.0);
    const auto never = estimate_arl(f, std::exp(700.0), 20, 50, 3);
    CHECK(never.mean == 50.0);
    CHECK(never.censored == 20);
}

TEST_CASE("calibration is reproducible and matches a direct estimate") {
    const auto f = in_control_factory(small_scenario(), g2(5));
    CalibrationOptions o;
    o.gamma = 50;
    o.replications = 300;
    o.seed = 21;
    o.workers = 1;
    const auto a = calibrate_threshold(f, o);
    o.workers = 8;
    const auto b = calibrate_threshold(f, o);
    CHECK(a == b);

    const auto direct = estimate_arl(f, a.threshold, o.replications, a.horizon, o.seed, 1);
    CHECK(direct.mean == a.arl_estimate);
    CHECK(direct.std_error == doctest::Approx(a.std_error).epsilon(1e-12));
    CHECK(a.arl_estimate >= 50.0);
    CHECK(std::abs(a.arl_estimate - 50.0) / 50.0 <= o.rel_tol + 1e-12);

    const auto w8 = estimate_arl(f, a.threshold, 300, a.horizon, 99, 8);
    const auto w1 = estimate_arl(f, a.threshold, 300, a.horizon, 99, 1);
    CHECK(w8.stop_times == w1.stop_times);
}

TEST_CASE("shared random numbers make the ARL monotone in the threshold") {
    const auto f = in_control_factory(small_scenario(), g2(5));
    double previous = 0.0;
    for (double a : {5.0, 20.0, 60.0, 150.0, 400.0}) {
        const auto e = estimate_arl(f, a, 200, 5000, 4);
        CHECK(e.mean >= previous);
        previous = e.mean;
    }
    CalibrationOptions o;
    o.gamma = 50;
    o.replications = 200;
    const auto rep = calibrate_threshold(f, o);
    for (const auto& p : rep.bracket_history)
        for (const auto& q : rep.bracket_history)
            if (p.exact && q.exact && p.threshold < q.threshold) CHECK(p.arl <= q.arl);
}

TEST_CASE("calibration options are validated") {
    const auto f = in_control_factory(small_scenario(), g2(5));
    CalibrationOptions o;
    o.replications = 0;
    CHECK_THROWS_AS(calibrate_threshold(f, o), ConfigError);
    o.replications = 10;
    o.gamma = -1;
    CHECK_THROWS_AS(calibrate_threshold(f, o), ConfigError);
}
