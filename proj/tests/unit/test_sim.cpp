#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "tssrp/errors.hpp"
#include "tssrp/sim.hpp"

using namespace tssrp;

namespace {

Scenario panel(std::size_t k, std::size_t q, std::vector<std::size_t> changed, double truth) {
    Scenario s;
    s.streams = k;
    s.sensors = q;
    s.r = std::min<std::size_t>(q, 2);
    s.gamma = 100;
    s.changed = std::move(changed);
    s.detector_models.assign(k, StreamModel::gaussian(0.0, 1.5));
    s.truth_models.assign(k, StreamModel::gaussian(0.0, truth));
    s.replications = 200;
    s.seed = 3;
    return s;
}

AlgorithmSpec prior(PriorPreset p, std::size_t k) {
    TssrpSpec t;
    t.prior = PriorSpec::preset(p, k);
    t.prior_label = to_string(p);
    return t;
}

std::vector<double> column_means(const Scenario& s, std::size_t t, std::size_t n) {
    Sampler sampler(12);
    std::vector<double> sum(s.streams, 0.0);
    const auto mask = changed_mask(s, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = generate_panel(s, t, mask, sampler);
        for (std::size_t k = 0; k < s.streams; ++k) sum[k] += row[k];
    }
    for (auto& v : sum) v /= double(n);
    return sum;
}

}  // namespace

TEST_CASE("panel regimes") {
    const std::size_t n = 100000;
    const double tol = 4.0 / std::sqrt(double(n));
    auto s = panel(12, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 1.5);
    SUBCASE("after the change") {
        const auto m = column_means(s, 1, n);
        for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(m[k] - 1.5) <= tol);
        CHECK(std::abs(m[10]) <= tol);
    }
    SUBCASE("never changes") {
        s.change_time = std::nullopt;
        for (double v : column_means(s, 5, n)) CHECK(std::abs(v) <= tol);
    }
    SUBCASE("before a later change") {
        s.change_time = 10;
        for (double v : column_means(s, 9, n)) CHECK(std::abs(v) <= tol);
    }
    SUBCASE("truth differs from belief") {
        auto mis = panel(12, 3, {0}, 2.0);
        const auto m = column_means(mis, 1, n);
        CHECK(std::abs(m[0] - 2.0) <= tol);
    }
}

TEST_CASE("random changed sets") {
    auto s = panel(10, 2, {}, 1.5);
    s.random_changes = 2;
    s.candidates = {0, 1, 3};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto mask = changed_mask(s, seed);
        CHECK(std::accumulate(mask.begin(), mask.end(), 0) == 2);
        for (std::size_t k = 0; k < 10; ++k)
            if (mask[k]) CHECK((k == 0 || k == 1 || k == 3));
        CHECK(mask == changed_mask(s, seed));
    }
}

TEST_CASE("network without edges is independent standard normals") {
    BayesNetSpec spec;
    spec.nodes = {"a", "b", "c", "d", "e"};
    spec.noise_sd.assign(5, 1.0);
    spec.standardize = false;
    Sampler sampler(1);
    const std::vector<unsigned char> none(5, 0);
    const int n = 100000;
    std::vector<double> sum(5, 0.0), sq(5, 0.0);
    double cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto x = generate_hot_forming(spec, none, 2.0, sampler);
        for (int k = 0; k < 5; ++k) sum[k] += x[k], sq[k] += x[k] * x[k];
        cross += x[0] * x[1];
    }
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(sum[k] / n) <= 4.0 / std::sqrt(double(n)));
        CHECK(std::abs(std::sqrt(sq[k] / n) - 1.0) <= 0.02);
    }
    CHECK(std::abs(cross / n) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("single edge propagates a root shift") {
    BayesNetSpec spec;
    spec.nodes = {"root", "child"};
    spec.edges = {{0, 1, 0.5}};
    spec.noise_sd = {1.0, 1.0};
    spec.standardize = true;
    CHECK(spec.effective_noise_sd()[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    Sampler sampler(2);
    const std::vector<unsigned char> root = {1, 0};
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += generate_hot_forming(spec, root, 2.0, sampler)[1];
    CHECK(std::abs(sum / n - 1.0) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("illustrative network is standardized in control") {
    const auto spec = BayesNetSpec::hot_forming_illustrative();
    CHECK(spec.roots() == std::vector<std::size_t>{0, 1, 3});
    Sampler sampler(3);
    const std::vector<unsigned char> none(5, 0);
    const int n = 100000;
    std::vector<double> sum(5, 0.0), sq(5, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto x = generate_hot_forming(spec, none, 0.0, sampler);
        for (int k = 0; k < 5; ++k) sum[k] += x[k], sq[k] += x[k] * x[k];
    }
    for (int k = 0; k < 5; ++k) {
        const double mean = sum[k] / n;
        CHECK(std::abs(std::sqrt(sq[k] / n - mean * mean) - 1.0) <= 0.02);
    }
}

TEST_CASE("cyclic networks are rejected") {
    BayesNetSpec spec;
    spec.nodes = {"a", "b", "c"};
    spec.edges = {{0, 1, 0.5}, {1, 2, 0.5}, {2, 0, 0.5}};
    spec.noise_sd.assign(3, 1.0);
    CHECK_THROWS_AS(spec.topological_order(), ConfigError);
    spec.edges = {{0, 5, 0.5}};
    CHECK_THROWS_AS(spec.topological_order(), ConfigError);
}

TEST_CASE("scenario validation") {
    auto s = panel(10, 11, {0}, 1.5);
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = panel(10, 2, {12}, 1.5);
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = panel(10, 2, {0}, 1.5);
    CHECK_NOTHROW(s.validate());
    CHECK(s.effective_horizon() == 10000);
}

TEST_CASE("labels") {
    CHECK(algorithm_label(prior(PriorPreset::G0, 100)) == "TSSRP(G0)");
    TssrpSpec t4 = std::get<TssrpSpec>(prior(PriorPreset::G3, 100));
    t4.rule = RuleKind::top_r_log_sum_randomized;
    CHECK(algorithm_label(t4) == "TSSRP(G3,T4)");
    CHECK(algorithm_label(TrasSpec{0.05}) == "TRAS(delta=0.05)");
    CHECK(prior_or_delta(TrasSpec{0.1}) == "0.1");
}

TEST_CASE("threshold zero gives zero delay") {
    auto s = panel(5, 5, {0, 1, 2, 3, 4}, 1.5);
    const auto rep = run_experiment(s, prior(PriorPreset::G2, 5), 0.0, 1);
    CHECK(rep.mean_delay == 0.0);
    CHECK(rep.false_alarms == 0);
    for (auto d : rep.delays) CHECK(d == 0);
}

TEST_CASE("delay shrinks with the threshold") {
    auto s = panel(5, 5, {0, 1, 2, 3, 4}, 1.5);
    s.replications = 1000;
    double previous = INFINITY;
    for (double a : {1e4, 1e3, 1e2}) {
        const auto rep = run_experiment(s, prior(PriorPreset::G2, 5), a, 8);
        CHECK(rep.mean_delay > 0.0);
        CHECK(std::isfinite(rep.mean_delay));
        CHECK(rep.mean_delay < previous);
        previous = rep.mean_delay;
    }
}

TEST_CASE("experiments do not depend on the worker count") {
    auto s = panel(20, 4, {0, 1, 2}, 1.5);
    const auto a = run_experiment(s, prior(PriorPreset::G2, 20), 500.0, 5, 1);
    const auto b = run_experiment(s, prior(PriorPreset::G2, 20), 500.0, 5, 8);
    CHECK(a.delays == b.delays);
    CHECK(a.occupancy == b.occupancy);
    CHECK(a.mean_delay == b.mean_delay);
}

TEST_CASE("poisoned unobserved values change nothing") {
    const auto s = panel(20, 4, {0, 1, 2}, 1.5);
    for (const AlgorithmSpec& algo : {prior(PriorPreset::G0, 20), AlgorithmSpec{TrasSpec{0.05}}}) {
        ReplicationBuilder b(s, algo);
        const double thr = std::holds_alternative<TssrpSpec>(algo) ? 1e5 : 25.0;
        for (std::uint64_t i = 0; i < 10; ++i) {
            auto p1 = b.procedure(thr, i);
            auto s1 = b.source(i, false);
            const auto clean = run(*p1, *s1, {300, true});
            auto p2 = b.procedure(thr, i);
            auto s2 = b.source(i, false);
            PoisonedSource poisoned(*s2, std::numeric_limits<double>::quiet_NaN());
            const auto dirty = run(*p2, poisoned, {300, true});
            CHECK(clean == dirty);
        }
    }
}

TEST_CASE("in-control occupancy of a symmetric setup is q/K") {
    auto s = panel(10, 4, {}, 1.5);
    s.change_time = std::nullopt;
    s.replications = 300;
    const auto rep = run_experiment(s, prior(PriorPreset::G2, 10), 200.0, 2);
    CHECK(rep.in_control);
    for (double o : rep.occupancy) CHECK(std::abs(o - 0.4) <= 0.05);
}
