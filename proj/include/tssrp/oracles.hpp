#pragma once

#include <span>

namespace tssrp::oracle {

// Brute-force reference computations on raw (not log) likelihood ratios.
// An entry with observed[i] == 0 contributes a ratio of one.

/// sum_{j=1..t} prod_{i=j..t} LR_i
double sr_double_sum(std::span<const double> lr, std::span<const unsigned char> observed);

/// prod_{i=1..t} LR_i
double likelihood_product(std::span<const double> lr, std::span<const unsigned char> observed);

/// R_t + L_t * r_tilde, both recomputed from scratch.
double randomized_from_scratch(std::span<const double> lr, std::span<const unsigned char> observed, double r_tilde);

/// P(nu <= t | data) by summing over every change time, with P(nu <= 0) = pi0
/// and P(nu = j) = (1 - pi0) p (1 - p)^(j-1) for j >= 1.
double posterior_by_enumeration(std::span<const double> lr, std::span<const unsigned char> observed, double pi0,
                                 double p);

}  // namespace tssrp::oracle
