#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tssrp/baselines.hpp"
#include "tssrp/errors.hpp"

using namespace tssrp;

namespace {

TrasConfig tras_config(std::size_t k, std::size_t q, double delta, double threshold) {
    TrasConfig c;
    c.streams = k;
    c.sensors = q;
    c.r = std::min<std::size_t>(k, 2);
    c.delta = delta;
    c.threshold = threshold;
    c.models.assign(k, StreamModel::gaussian(0.0, 1.5));
    c.seed = 4;
    return c;
}

}  // namespace

TEST_CASE("compensated cusum update") {
    CHECK(update_tras(0.2, 0.0, false, 0.05) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(update_tras(1.0, -5.0, true, 0.05) == 0.0);
    const double llr = StreamModel::gaussian(0.0, 1.5).log_likelihood_ratio(1.5);
    CHECK(update_tras(0.0, llr, true, 0.05) == doctest::Approx(1.125).epsilon(1e-14));
}

TEST_CASE("threshold zero alarms at the first round") {
    TrasDetector det(tras_config(5, 2, 0.05, 0.0));
    const std::vector<double> x(5, 0.0);
    CHECK(det.step(x).alarm);
    CHECK(det.time() == 1);
    CHECK_THROWS_AS(det.step(x), StateError);
}

TEST_CASE("no information and no compensation never alarms") {
    TrasDetector det(tras_config(5, 2, 0.0, 1.0));
    // x = -10 gives a hugely negative llr, so observed W is pinned at zero
    const std::vector<double> x(5, -10.0);
    for (int t = 0; t < 500; ++t) CHECK_FALSE(det.step(x).alarm);
    for (double w : det.w()) CHECK(w == 0.0);
}

TEST_CASE("layout follows the largest statistics") {
    TrasDetector det(tras_config(6, 2, 0.05, 1e9));
    std::vector<double> x(6, 0.0);
    // first layout is random; make stream 5 (0-based 4) look changed whenever seen
    for (int t = 0; t < 60; ++t) {
        for (std::size_t k = 0; k < 6; ++k) x[k] = k == 4 ? 3.0 : -1.0;
        det.step(x);
    }
    CHECK(det.layout().contains(4));
}

TEST_CASE("unobserved entries are never read") {
    TrasDetector clean(tras_config(12, 3, 0.05, 1e9)), dirty(tras_config(12, 3, 0.05, 1e9));
    Sampler s(8);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> x(12), poisoned(12, std::numeric_limits<double>::quiet_NaN());
        for (auto& v : x) v = s.standard_normal();
        for (std::size_t k : dirty.layout().observed()) poisoned[k] = x[k];
        clean.step(x);
        dirty.step(poisoned);
        REQUIRE(clean.layout() == dirty.layout());
    }
    CHECK(std::vector<double>(clean.w().begin(), clean.w().end()) ==
          std::vector<double>(dirty.w().begin(), dirty.w().end()));
}

TEST_CASE("config validation") {
    auto c = tras_config(5, 6, -0.1, 1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(TrasDetector(tras_config(5, 2, 0.05, -1.0)), ConfigError);
}
