#include "tssrp/bayes_oracle.hpp"

#include <cmath>
#include <limits>

#include "tssrp/errors.hpp"

namespace tssrp {
namespace {

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("geometric prior parameter p must lie in (0, 1)");
}

void check_lr(double lr, bool observed) {
    if (observed && !(lr > 0.0 && std::isfinite(lr))) throw InputError("likelihood ratio must be positive and finite");
}

}  // namespace

double r_from_pi(double pi, double p) {
    if (!(pi < 1.0 - 1e-15)) throw InputError("posterior too close to 1 to form pi / (p (1 - pi))");
    return pi / (p * (1.0 - pi));
}

PosteriorState posterior_init(double pi0, double p) {
    check_p(p);
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw InputError("initial posterior must lie in [0, 1]");
    PosteriorState s{pi0, p, 0.0};
    s.r_p = pi0 < 1.0 - 1e-15 ? r_from_pi(pi0, p) : std::numeric_limits<double>::infinity();
    return s;
}

PosteriorState posterior_update(const PosteriorState& state, double lr, bool observed) {
    check_p(state.p);
    check_lr(lr, observed);
    const double pi = state.pi;
    const double p = state.p;
    PosteriorState next = state;
    if (!observed) {
        next.pi = pi + (1.0 - pi) * p;
    } else {
        const double changed = lr * pi + (1.0 - pi) * p * lr;
        next.pi = changed / (changed + (1.0 - pi) * (1.0 - p));
    }
    next.r_p = next.pi < 1.0 - 1e-15 ? r_from_pi(next.pi, p) : std::numeric_limits<double>::infinity();
    return next;
}

double finite_p_score(double r_p, double p, double lr, bool observed) {
    check_p(p);
    check_lr(lr, observed);
    if (observed) return lr / (1.0 - p) * (r_p + 1.0);
    return (r_p + 1.0) / (1.0 - p);
}

}  // namespace tssrp
