#include <doctest.h>

#include <cmath>
#include <vector>

#include "tssrp/bayes_oracle.hpp"
#include "tssrp/detector.hpp"
#include "tssrp/errors.hpp"
#include "tssrp/oracles.hpp"
#include "tssrp/verify.hpp"

using namespace tssrp;

TEST_CASE("posterior update basics") {
    const auto s = posterior_update({0.3, 0.1, r_from_pi(0.3, 0.1)}, 1.0, false);
    CHECK(s.pi == doctest::Approx(0.37).epsilon(1e-14));
    const auto one = posterior_update({1.0, 0.1, 0.0}, 0.2, true);
    CHECK(one.pi == 1.0);
}

TEST_CASE("first observation agrees with enumeration") {
    const double lr = std::exp(1.125);
    const auto s = posterior_update(posterior_init(0.0, 1e-3), lr, true);
    const std::vector<double> lrs = {lr};
    const std::vector<unsigned char> obs = {1};
    CHECK(s.pi == doctest::Approx(oracle::posterior_by_enumeration(lrs, obs, 0.0, 1e-3)).epsilon(1e-12));
    // by hand: p lr / (p lr + 1 - p)
    CHECK(s.pi == doctest::Approx(1e-3 * lr / (1e-3 * lr + 1 - 1e-3)).epsilon(1e-12));
}

TEST_CASE("finite-p recursion") {
    CHECK(finite_p_score(0.0, 0.01, 1.0, false) == doctest::Approx(1.0 / 0.99).epsilon(1e-14));
    CHECK(finite_p_score(2.0, 0.5, 3.0, true) == doctest::Approx(3.0 / 0.5 * 3.0).epsilon(1e-14));
}

TEST_CASE("pi route and r_p route agree") {
    const std::vector<double> lrs = {1.8, 0.4, 2.9, 1.0, 0.7, 3.3, 1.2, 0.2, 2.2, 1.5};
    const std::vector<unsigned char> obs = {1, 0, 1, 1, 0, 1, 0, 1, 1, 1};
    for (double p : {0.1, 0.01, 0.001}) {
        PosteriorState s = posterior_init(0.0, p);
        double r = 0.0;
        for (std::size_t i = 0; i < lrs.size(); ++i) {
            s = posterior_update(s, lrs[i], obs[i] != 0);
            r = finite_p_score(r, p, lrs[i], obs[i] != 0);
            CHECK(s.r_p == doctest::Approx(r).epsilon(1e-9));
        }
    }
}

TEST_CASE("small p approaches the randomized statistic") {
    const std::vector<double> lrs = {1.8, 0.4, 2.9, 1.0, 0.7, 3.3, 1.2, 0.2, 2.2, 1.5};
    const std::vector<unsigned char> obs = {1, 0, 1, 1, 0, 1, 0, 1, 1, 1};
    const double r_tilde = 0.6;
    const double target = oracle::randomized_from_scratch(lrs, obs, r_tilde);
    double previous = INFINITY;
    for (double p : {1e-3, 1e-4, 1e-5}) {
        // pi0 chosen so the initial r_p equals r_tilde
        double r = r_tilde;
        for (std::size_t i = 0; i < lrs.size(); ++i) r = finite_p_score(r, p, lrs[i], obs[i] != 0);
        const double err = std::abs(r - target) / target;
        CHECK(err < previous);
        previous = err;
        if (p == 1e-5) CHECK(err <= 1e-3);
    }
}

TEST_CASE("input checks") {
    CHECK_THROWS_AS(posterior_init(0.0, 0.0), InputError);
    CHECK_THROWS_AS(posterior_init(0.0, 1.0), InputError);
    CHECK_THROWS_AS(posterior_init(1.5, 0.1), InputError);
    CHECK_THROWS_AS(posterior_update(posterior_init(0.0, 0.1), 0.0, true), InputError);
    CHECK_THROWS_AS(finite_p_score(1.0, 0.1, -1.0, true), InputError);
    CHECK_THROWS_AS(r_from_pi(1.0, 0.1), InputError);
}

TEST_CASE("oracle suite") {
    for (const auto& c : run_oracle_suite(7, 10)) {
        INFO(c.name << " worst " << c.worst);
        CHECK(c.passed);
    }
}
