#pragma once

#include <string>
#include <variant>

#include "tssrp/rng.hpp"

namespace tssrp {

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Student t with unit scale, shifted to `location`.
struct StudentT {
    double df = 5.0;
    double location = 0.0;
    friend bool operator==(const StudentT&, const StudentT&) = default;
};

using Distribution = std::variant<Gaussian, StudentT>;

enum class Regime { pre, post };

double log_density(const Distribution& dist, double x);
std::string describe(const Distribution& dist);

/// Random source owned by one worker. Keeps the standard-normal generator's
/// cached second variate so consecutive draws cost one polar step on average.
class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double standard_normal() { return normal_(engine_); }
    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }
    Engine& engine() { return engine_; }

  private:
    Engine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double sample(const Distribution& dist, Sampler& sampler);

/// Pre- and post-change densities of one stream. Immutable after
/// construction; safe to share between workers.
class StreamModel {
  public:
    StreamModel(Distribution pre, Distribution post);

    static StreamModel gaussian(double pre_mean, double post_mean, double sd = 1.0);
    static StreamModel student_t(double df, double pre_location, double post_location);

    const Distribution& pre() const { return pre_; }
    const Distribution& post() const { return post_; }
    const Distribution& regime(Regime r) const { return r == Regime::pre ? pre_ : post_; }

    /// log f_post(x) - log f_pre(x). Throws InputError for non-finite x.
    double log_likelihood_ratio(double x) const;

    double sample(Regime regime, Sampler& sampler) const {
        return tssrp::sample(this->regime(regime), sampler);
    }

    friend bool operator==(const StreamModel& a, const StreamModel& b) {
        return a.pre_ == b.pre_ && a.post_ == b.post_;
    }

  private:
    Distribution pre_;
    Distribution post_;
    // Both regimes Gaussian: llr = quad*x^2 + lin*x + constant.
    bool gaussian_pair_ = false;
    double quad_ = 0.0;
    double lin_ = 0.0;
    double constant_ = 0.0;
};

}  // namespace tssrp
