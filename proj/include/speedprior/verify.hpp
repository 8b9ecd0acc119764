#pragma once

// Verification suites behind `speedprior verify`. Each suite checks one exact
// invariant or experiment and reports PASS/FAIL with its raw numbers.

#include "speedprior/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace speedprior::verify {

struct SuiteOptions {
    /// Suite-specific depth (phase count). 0 picks the suite's default.
    int k = 0;
    /// Sequence length for prediction suites. 0 picks the default.
    std::size_t n = 0;
    /// 0 picks the default of 1/2.
    Rational epsilon = 0;
    /// 0 picks the suite's default phase cap.
    int k_cap = 0;
    unsigned workers = 1;
    std::uint64_t seeds = 30;
    std::uint64_t seed = 0;
    /// Expected total errors for the prediction suite, when one was recorded.
    std::optional<std::size_t> expected_errors;
};

struct SuiteReport {
    std::string suite;
    bool passed = false;
    nlohmann::ordered_json data;
    /// One line per failed check, empty on PASS.
    std::vector<std::string> failures;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& options);

SuiteReport steps(const SuiteOptions& options);        // naive step accounting, k = 1..k
SuiteReport soundness(const SuiteOptions& options);    // records re-verify, phase membership
SuiteReport kraft(const SuiteOptions& options);        // Kraft sums and semimeasure inequality
SuiteReport envelopes(const SuiteOptions& options);    // alternate forms within a factor of 2
SuiteReport mass(const SuiteOptions& options);         // S_Kt mass on C_t at most 1/t
SuiteReport certificate(const SuiteOptions& options);  // certified intervals and nesting
SuiteReport lemma1(const SuiteOptions& options);       // decoder mass and Km against nu
SuiteReport prediction(const SuiteOptions& options);   // alternating sequence, S_Fast
SuiteReport adversarial(const SuiteOptions& options);  // self-defeat of both predictors
SuiteReport fastpath(const SuiteOptions& options);     // phases needed at n/2 and n
SuiteReport stochastic(const SuiteOptions& options);   // regret trend, S_Kt, bernoulli(2/3)

}  // namespace speedprior::verify
