#include "tssrp/oracles.hpp"

#include <cmath>
#include <cstddef>

#include "tssrp/errors.hpp"

namespace tssrp::oracle {
namespace {

double ratio(std::span<const double> lr, std::span<const unsigned char> observed, std::size_t i) {
    return observed[i] ? lr[i] : 1.0;
}

void check(std::span<const double> lr, std::span<const unsigned char> observed) {
    if (lr.size() != observed.size()) throw InputError("oracle: ratio and mask lengths differ");
}

}  // namespace

double sr_double_sum(std::span<const double> lr, std::span<const unsigned char> observed) {
    check(lr, observed);
    const std::size_t t = lr.size();
    double total = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
        double prod = 1.0;
        for (std::size_t i = j; i < t; ++i) prod *= ratio(lr, observed, i);
        total += prod;
    }
    return total;
}

double likelihood_product(std::span<const double> lr, std::span<const unsigned char> observed) {
    check(lr, observed);
    double prod = 1.0;
    for (std::size_t i = 0; i < lr.size(); ++i) prod *= ratio(lr, observed, i);
    return prod;
}

double randomized_from_scratch(std::span<const double> lr, std::span<const unsigned char> observed, double r_tilde) {
    return sr_double_sum(lr, observed) + likelihood_product(lr, observed) * r_tilde;
}

double posterior_by_enumeration(std::span<const double> lr, std::span<const unsigned char> observed, double pi0,
                                double p) {
    check(lr, observed);
    const std::size_t t = lr.size();
    // Joint weight of (nu, data) relative to the all-pre-change likelihood.
    double changed = pi0 * likelihood_product(lr, observed);
    for (std::size_t j = 1; j <= t; ++j) {
        double prod = 1.0;
        for (std::size_t i = j - 1; i < t; ++i) prod *= ratio(lr, observed, i);
        changed += (1.0 - pi0) * p * std::pow(1.0 - p, static_cast<double>(j - 1)) * prod;
    }
    const double unchanged = (1.0 - pi0) * std::pow(1.0 - p, static_cast<double>(t));
    return changed / (changed + unchanged);
}

}  // namespace tssrp::oracle
