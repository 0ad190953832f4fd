#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qndc::cli {

/// Mutation hooks used to check that the suites can fail.
struct SelftestHooks {
    bool flip_coupling_sign = false; ///< run every model with the negative coupling branch
    bool corrupt_delta = false;      ///< scale references by r_L instead of r_L^2
};

struct SelftestOptions {
    int sweep_size = 200;
    std::int64_t shots = 20000;
    std::uint64_t seed = 20240917;
    SelftestHooks hooks;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

/// Prints one line per suite; returns 0 iff all pass.
int report_selftest(const std::vector<SuiteResult>& results, std::ostream& out);

} // namespace qndc::cli
