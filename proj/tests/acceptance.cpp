#include "sudest/verify.hpp"

#include <cstring>
#include <iostream>
#include <string>

// Acceptance gate: one line per check, nonzero exit if any fails.
int main(int argc, char** argv) {
    sudest::VerifyOptions options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--fast") == 0) {
            options.fast = true;
        } else if (std::strcmp(argv[i], "--inject-failure") == 0) {
            options.inject_failure = true;
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            options.seed = std::stoull(argv[++i]);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            options.threads = std::stoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--fast] [--inject-failure] [--seed S] [--threads T]\n";
            return 2;
        }
    }

    const std::vector<sudest::CheckResult> results = sudest::run_acceptance_checks(options);
    int failed = 0;
    double total_seconds = 0.0;
    for (const sudest::CheckResult& result : results) {
        if (!result.pass) ++failed;
        total_seconds += result.seconds;
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << " ("
                  << result.seconds << "s): " << result.details << "\n";
        std::cout.flush();
    }
    std::cout << results.size() - failed << "/" << results.size() << " acceptance checks passed in "
              << total_seconds << "s\n";
    return failed == 0 ? 0 : 1;
}
