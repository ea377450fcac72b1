// Acceptance suite: runs every criterion and prints one pass/fail line each.

#include <cstdio>
#include <iostream>

#include "hbs/selftest.hpp"

int main() {
    const std::vector<hbs::CheckResult> checks = hbs::run_acceptance_criteria();
    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const hbs::CheckResult& c = checks[i];
        std::printf("[%s] criterion %zu: %s -- %s (%.2f s)\n", c.pass ? "PASS" : "FAIL", i + 1,
                    c.name.c_str(), c.detail.c_str(), c.seconds);
        if (!c.pass) ++failures;
    }
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", checks.size());
    return 0;
}
