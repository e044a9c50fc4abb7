#include "tssrp/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tssrp/errors.hpp"

namespace tssrp {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void validate(const Distribution& dist, const char* which) {
    std::visit(overloaded{
                   [&](const Gaussian& g) {
                       if (!(g.sd > 0.0) || !std::isfinite(g.sd) || !std::isfinite(g.mean))
                           throw ConfigError(std::string(which) + ": gaussian needs finite mean and sd > 0");
                   },
                   [&](const StudentT& t) {
                       if (!(t.df > 0.0) || !std::isfinite(t.df) || !std::isfinite(t.location))
                           throw ConfigError(std::string(which) + ": student_t needs df > 0 and finite location");
                   },
               },
               dist);
}

}  // namespace

double log_density(const Distribution& dist, double x) {
    return std::visit(overloaded{
                          [x](const Gaussian& g) {
                              const double z = (x - g.mean) / g.sd;
                              return -0.5 * z * z - std::log(g.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
                          },
                          [x](const StudentT& t) {
                              const double z = x - t.location;
                              return std::lgamma(0.5 * (t.df + 1.0)) - std::lgamma(0.5 * t.df) -
                                     0.5 * std::log(t.df * std::numbers::pi) -
                                     0.5 * (t.df + 1.0) * std::log1p(z * z / t.df);
                          },
                      },
                      dist);
}

std::string describe(const Distribution& dist) {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{
                   [&](const Gaussian& g) { out << "N(" << g.mean << ", " << g.sd << "^2)"; },
                   [&](const StudentT& t) { out << "t_" << t.df << "(" << t.location << ")"; },
               },
               dist);
    return out.str();
}

double sample(const Distribution& dist, Sampler& sampler) {
    return std::visit(overloaded{
                          [&](const Gaussian& g) { return g.mean + g.sd * sampler.standard_normal(); },
                          [&](const StudentT& t) {
                              const double z = sampler.standard_normal();
                              const double chi2 = sampler.gamma(0.5 * t.df, 2.0);
                              return t.location + z / std::sqrt(chi2 / t.df);
                          },
                      },
                      dist);
}

StreamModel::StreamModel(Distribution pre, Distribution post) : pre_(pre), post_(post) {
    validate(pre_, "pre-change model");
    validate(post_, "post-change model");
    if (pre_ == post_) throw ConfigError("pre- and post-change models are identical; no change to detect");
    if (const auto* g0 = std::get_if<Gaussian>(&pre_)) {
        if (const auto* g1 = std::get_if<Gaussian>(&post_)) {
            gaussian_pair_ = true;
            const double p0 = 1.0 / (g0->sd * g0->sd);
            const double p1 = 1.0 / (g1->sd * g1->sd);
            quad_ = 0.5 * (p0 - p1);
            lin_ = g1->mean * p1 - g0->mean * p0;
            constant_ = 0.5 * (g0->mean * g0->mean * p0 - g1->mean * g1->mean * p1) + std::log(g0->sd / g1->sd);
        }
    }
}

StreamModel StreamModel::gaussian(double pre_mean, double post_mean, double sd) {
    return StreamModel(Gaussian{pre_mean, sd}, Gaussian{post_mean, sd});
}

StreamModel StreamModel::student_t(double df, double pre_location, double post_location) {
    return StreamModel(StudentT{df, pre_location}, StudentT{df, post_location});
}

double StreamModel::log_likelihood_ratio(double x) const {
    if (!std::isfinite(x)) throw InputError("log-likelihood ratio requested for a non-finite observation");
    if (gaussian_pair_) return (quad_ * x + lin_) * x + constant_;
    return log_density(post_, x) - log_density(pre_, x);
}

}  // namespace tssrp
