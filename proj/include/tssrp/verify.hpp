#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tssrp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // largest observed discrepancy
    double tolerance = 0.0;
    std::string detail;
};

/// Exact agreement between the production recursions and the brute-force
/// oracles on seeded random records.
std::vector<CheckResult> run_oracle_suite(std::uint64_t seed, std::size_t records = 25);

}  // namespace tssrp
