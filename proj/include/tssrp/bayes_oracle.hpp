#pragma once

namespace tssrp {

/// Finite-p Bayesian posterior for one stream under a geometric change-time
/// prior with parameter p. Verification only; plain (not log) arithmetic.
struct PosteriorState {
    double pi = 0.0;  // P(change has occurred | observed data)
    double p = 0.01;
    double r_p = 0.0;  // pi / (p (1 - pi))
};

/// r_p implied by pi. Throws InputError once pi is within 1e-15 of 1.
double r_from_pi(double pi, double p);

/// Posterior with prior mass pi0 on "already changed" at t = 0.
PosteriorState posterior_init(double pi0, double p);

/// One round of Bayes' rule; lr is the raw likelihood ratio of the observation.
PosteriorState posterior_update(const PosteriorState& state, double lr, bool observed);

/// Direct recursion for r_p: observed lr/(1-p) (r_p + 1), unobserved (r_p + 1)/(1-p).
double finite_p_score(double r_p, double p, double lr, bool observed);

}  // namespace tssrp
