#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epigame {

struct SuiteOptions {
    std::uint64_t seed = 42;
    int cases = 200;
    bool inject_ds_expiry_fault = false;  // CI self-test: breaks the expiry suite
};

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::vector<std::string> counterexamples;  // capped

    bool ok() const { return failures == 0; }
};

// Randomized property suites covering the epidemic-model identities, the
// defection-set closed forms, threshold common knowledge, truncation, and the
// bound sandwich. Each suite runs `cases` random instances (scaled down for
// the expensive ones).
std::vector<SuiteResult> run_lemma_suites(const SuiteOptions& opts);

}  // namespace epigame
