#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace emcal {

/// Outcome of one acceptance criterion. `fingerprint` collects every number the check computed
/// and is what the reproducibility criterion compares bit for bit.
struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double time_limit_s = 0.0;  // 0: no limit
    std::vector<double> fingerprint;
};

struct ValidationOptions {
    std::uint64_t seed = 7;
    /// Criterion names to run; empty runs all.
    std::vector<std::string> only;
};

/// Names in execution order.
const std::vector<std::string>& criterion_names();

/// Runs the synthetic acceptance suite. When `progress` is set, each result line is written as
/// soon as the criterion finishes.
std::vector<CriterionResult> run_validation(const ValidationOptions& opts, std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace emcal
