#include "tssrp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "tssrp/bayes_oracle.hpp"
#include "tssrp/detector.hpp"
#include "tssrp/models.hpp"
#include "tssrp/oracles.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {
namespace {

struct Record {
    std::vector<double> log_lr;
    std::vector<double> lr;
    std::vector<unsigned char> observed;
};

// Gaussian 0 -> 1.5 record; the first `changed_from` rounds are pre-change.
Record make_record(std::uint64_t seed, std::size_t length, double observe_prob, std::size_t changed_from) {
    const StreamModel model = StreamModel::gaussian(0.0, 1.5);
    Sampler sampler(seed);
    Record rec;
    for (std::size_t t = 0; t < length; ++t) {
        const double x = model.sample(t >= changed_from ? Regime::post : Regime::pre, sampler);
        const bool seen = sampler.uniform01() < observe_prob;
        const double llr = model.log_likelihood_ratio(x);
        rec.log_lr.push_back(llr);
        rec.lr.push_back(std::exp(llr));
        rec.observed.push_back(seen ? 1 : 0);
    }
    return rec;
}

double rel_diff_log(double log_a, double log_b) { return std::abs(std::expm1(log_a - log_b)); }
double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult finish(std::string name, double worst, double tol, std::size_t cases) {
    CheckResult c;
    c.name = std::move(name);
    c.worst = worst;
    c.tolerance = tol;
    c.passed = worst <= tol;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu cases, worst %.3e, tol %.1e", cases, worst, tol);
    c.detail = buf;
    return c;
}

CheckResult full_observation(std::uint64_t seed, std::size_t records) {
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t n = 0; n < records; ++n) {
        const Record rec = make_record(derive_seed(seed, n), 20, 1.1, n % 2 ? 0 : 10);
        LocalState s;
        for (std::size_t t = 0; t < 20; ++t) {
            s = update_local(s, rec.log_lr[t], true);
            const auto upto = static_cast<std::ptrdiff_t>(t + 1);
            const double brute = oracle::sr_double_sum({rec.lr.begin(), rec.lr.begin() + upto},
                                                       {rec.observed.begin(), rec.observed.begin() + upto});
            worst = std::max(worst, rel_diff_log(s.log_r, std::log(brute)));
            ++cases;
        }
    }
    return finish("full-observation recursion vs double sum (t <= 20)", worst, 1e-10, cases);
}

CheckResult decomposition(std::uint64_t seed, std::size_t records) {
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t n = 0; n < records; ++n) {
        const Record rec = make_record(derive_seed(seed, 1000 + n), 50, 0.4, 25);
        Engine rng = make_engine(derive_seed(seed, 5000 + n));
        const double r_tilde = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        LocalState s;
        // The randomized score obeys the same recursion, started from r_tilde.
        LocalState star{std::log(r_tilde), 0.0};
        for (std::size_t t = 0; t < 50; ++t) {
            s = update_local(s, rec.log_lr[t], rec.observed[t] != 0);
            star = update_local(star, rec.log_lr[t], rec.observed[t] != 0);
            const auto upto = static_cast<std::ptrdiff_t>(t + 1);
            const double brute = oracle::randomized_from_scratch({rec.lr.begin(), rec.lr.begin() + upto},
                                                                 {rec.observed.begin(), rec.observed.begin() + upto},
                                                                 r_tilde);
            worst = std::max(worst, rel_diff_log(star.log_r, std::log(brute)));
            worst = std::max(worst, rel_diff_log(randomized_score(s, r_tilde), std::log(brute)));
            ++cases;
        }
    }
    return finish("frozen-draw decomposition R* = R + L r (50-step mixed records)", worst, 1e-10, cases);
}

CheckResult conjugacy(std::uint64_t seed, std::size_t records) {
    double worst = 0.0;
    std::size_t cases = 0;
    for (double p : {0.1, 0.01, 0.001}) {
        for (std::size_t n = 0; n < records; ++n) {
            const Record rec = make_record(derive_seed(seed, 2000 + n), 50, 0.5, 1000);
            PosteriorState post = posterior_init(0.0, p);
            double r_direct = 0.0;
            for (std::size_t t = 0; t < 50; ++t) {
                const bool seen = rec.observed[t] != 0;
                post = posterior_update(post, rec.lr[t], seen);
                r_direct = finite_p_score(r_direct, p, rec.lr[t], seen);
                worst = std::max(worst, rel_diff(post.r_p, r_direct));
                ++cases;
            }
        }
    }
    return finish("posterior route vs finite-p recursion (p = 0.1, 0.01, 0.001)", worst, 1e-9, cases);
}

CheckResult enumeration(std::uint64_t seed, std::size_t records) {
    double worst = 0.0;
    std::size_t cases = 0;
    for (double p : {0.1, 0.01, 0.001}) {
        for (std::size_t n = 0; n < records; ++n) {
            const Record rec = make_record(derive_seed(seed, 3000 + n), 15, 0.6, 8);
            const double pi0 = 0.05 * static_cast<double>(n % 3);
            PosteriorState post = posterior_init(pi0, p);
            for (std::size_t t = 0; t < rec.lr.size(); ++t) {
                post = posterior_update(post, rec.lr[t], rec.observed[t] != 0);
                const auto upto = static_cast<std::ptrdiff_t>(t + 1);
                const double brute = oracle::posterior_by_enumeration(
                    {rec.lr.begin(), rec.lr.begin() + upto}, {rec.observed.begin(), rec.observed.begin() + upto},
                    pi0, p);
                worst = std::max(worst, rel_diff(post.pi, brute));
                ++cases;
            }
        }
    }
    return finish("posterior recursion vs change-time enumeration", worst, 1e-10, cases);
}

CheckResult limit(std::uint64_t seed, std::size_t records) {
    double worst = 0.0;
    bool monotone = true;
    std::size_t cases = 0;
    for (std::size_t n = 0; n < records; ++n) {
        const Record rec = make_record(derive_seed(seed, 4000 + n), 10, 0.5, 5);
        Engine rng = make_engine(derive_seed(seed, 6000 + n));
        const double r_tilde = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
        const double target = oracle::randomized_from_scratch(rec.lr, rec.observed, r_tilde);
        double previous = std::numeric_limits<double>::infinity();
        for (double p : {1e-2, 1e-3, 1e-4, 1e-5}) {
            // Prior mass at t = 0 chosen so that r_p starts at r_tilde.
            PosteriorState post = posterior_init(p * r_tilde / (1.0 + p * r_tilde), p);
            for (std::size_t t = 0; t < rec.lr.size(); ++t) post = posterior_update(post, rec.lr[t], rec.observed[t] != 0);
            const double err = rel_diff(post.r_p, target);
            if (!(err < previous)) monotone = false;
            previous = err;
        }
        worst = std::max(worst, previous);
        ++cases;
    }
    CheckResult c = finish("finite-p limit |R_p - R*| / R* at p = 1e-5", worst, 1e-3, cases);
    if (!monotone) {
        c.passed = false;
        c.detail += ", error not decreasing in p";
    }
    return c;
}

}  // namespace

std::vector<CheckResult> run_oracle_suite(std::uint64_t seed, std::size_t records) {
    return {full_observation(seed, records), decomposition(seed, records), conjugacy(seed, records),
            enumeration(seed, records), limit(seed, records)};
}

}  // namespace tssrp
