// SPDX-License-Identifier: Apache-2.0
//
// Randomized self-check of every module invariant, driven by one seed.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace matweight {

struct VerifyOptions {
    int depth = 5;   // largest tree depth drawn
    int dim = 2;     // largest matrix dimension drawn
    std::uint64_t seed = 7;
    int trials = 20; // random weights
    std::string fixtures;  // optional directory with the shipped JSON fixtures
};

struct CheckResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    double worst = 0.0;  // largest observed violation metric (check specific)
    std::string detail;  // first failure
    [[nodiscard]] bool passed() const { return failures == 0; }
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    [[nodiscard]] int passed() const;
    [[nodiscard]] int failed() const;
    [[nodiscard]] bool ok() const { return failed() == 0; }
};

VerifyReport run_verify(const VerifyOptions& opts);

void print_report(std::ostream& out, const VerifyReport& r);

}  // namespace matweight
