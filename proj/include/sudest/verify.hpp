#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sudest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 20240817;
    /// Reduced trial counts for development runs; the acceptance gate always
    /// uses the full settings.
    bool fast = false;
    /// Append a deliberately failing check to prove failures are reported.
    bool inject_failure = false;
    int threads = 0;  // 0: hardware concurrency
    /// When non-empty, run only the check with this name.
    std::string only;
};

std::vector<std::string> acceptance_check_names();

/// The acceptance suite: eleven checks, each pinning one quantitative claim
/// of the estimation theory at desk scale.
std::vector<CheckResult> run_acceptance_checks(const VerifyOptions& options);

}  // namespace sudest
