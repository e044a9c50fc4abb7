#include <doctest.h>

#include <cmath>
#include <variant>

#include "tssrp/errors.hpp"
#include "tssrp/priors.hpp"
#include "tssrp/rng.hpp"

using namespace tssrp;

TEST_CASE("preset shapes") {
    const auto g3 = PriorSpec::preset(PriorPreset::G3, 100);
    REQUIRE(g3.size() == 100);
    for (std::size_t k = 0; k < 100; ++k) CHECK(g3[k] == PriorDescriptor{PointMass{0.0}});

    const auto g2 = PriorSpec::preset(PriorPreset::G2, 100);
    for (std::size_t k = 0; k < 100; ++k) CHECK(g2[k] == PriorDescriptor{UniformPrior{0.0, 1.0}});

    const auto g0 = PriorSpec::preset(PriorPreset::G0, 100);
    CHECK(g0[9] == PriorDescriptor{UniformPrior{0.5, 1.0}});
    CHECK(g0[10] == PriorDescriptor{UniformPrior{0.0, 0.5}});

    const auto g1 = PriorSpec::preset(PriorPreset::G1, 100);
    CHECK(g1[4] == PriorDescriptor{UniformPrior{0.5, 1.0}});
    CHECK(g1[5] == PriorDescriptor{UniformPrior{0.0, 0.5}});
    CHECK(g1.preset_name() == PriorPreset::G1);
}

TEST_CASE("informative presets need enough streams") {
    CHECK_THROWS_AS(PriorSpec::preset(PriorPreset::G0, 5), ConfigError);
    CHECK_NOTHROW(PriorSpec::preset(PriorPreset::G1, 5));
    CHECK_NOTHROW(PriorSpec::preset(PriorPreset::G2, 1));
}

TEST_CASE("preset names round trip") {
    for (auto p : {PriorPreset::G0, PriorPreset::G1, PriorPreset::G2, PriorPreset::G3})
        CHECK(parse_prior_preset(to_string(p)) == p);
    CHECK_FALSE(parse_prior_preset("G9").has_value());
}

TEST_CASE("draws respect the support") {
    Engine rng(5);
    const auto g3 = PriorSpec::preset(PriorPreset::G3, 100);
    for (int i = 0; i < 100; ++i) CHECK(g3.draw(i % 100, rng) == 0.0);

    const auto g0 = PriorSpec::preset(PriorPreset::G0, 100);
    for (int i = 0; i < 10000; ++i) {
        const double v = g0.draw(0, rng);
        CHECK((v >= 0.5 && v <= 1.0));
    }
    const auto g2 = PriorSpec::preset(PriorPreset::G2, 100);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = g2.draw(3, rng);
        REQUIRE((v >= 0.0 && v <= 1.0));
        sum += v;
    }
    const double se = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(sum / n - 0.5) <= 4.0 * se);
}

TEST_CASE("tabulated prior interpolates its quantiles") {
    const PriorDescriptor tab = TabulatedPrior{{0.0, 1.0, 3.0}};
    CHECK(PriorSpec::support_min(tab) == 0.0);
    CHECK(PriorSpec::support_max(tab) == 3.0);
    Engine rng(7);
    const int n = 100000;
    int below_one = 0;
    for (int i = 0; i < n; ++i) below_one += PriorSpec::draw(tab, rng) < 1.0;
    // half the mass lies on [0, 1]
    CHECK(std::abs(below_one / double(n) - 0.5) <= 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("invalid descriptors are rejected") {
    CHECK_THROWS_AS(PriorSpec({UniformPrior{1.0, 0.5}}), ConfigError);
    CHECK_THROWS_AS(PriorSpec({PointMass{-1.0}}), ConfigError);
    CHECK_THROWS_AS(PriorSpec({TabulatedPrior{{0.0}}}), ConfigError);
    CHECK_THROWS_AS(PriorSpec({TabulatedPrior{{1.0, 0.5}}}), ConfigError);
}
