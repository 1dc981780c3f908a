#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracount/params.hpp"

namespace fracount {

struct VerifyOptions {
    /// "default" (mu in {0.3, 0.5, 0.7, 1}, four beta values each) or "quick".
    std::string grid = "default";
    /// Fixed-t count draws per grid point.
    long long samples = 1000000;
    /// First-arrival draws per Kolmogorov-Smirnov check.
    long long ks_draws = 100000;
    std::uint64_t seed = 42;
    int threads = 1;
};

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

std::vector<FractalityParams> verify_grid(const std::string& name);

/// Runs the invariant suite: closed-form reductions, normalization, moment
/// cross-routes, interarrival checks, combinatorial identities, Monte Carlo
/// agreement and derivative signs. Each check compares two independent
/// routes through the library (or a library route against a closed form).
VerifyReport verify(const VerifyOptions& options);

}  // namespace fracount
