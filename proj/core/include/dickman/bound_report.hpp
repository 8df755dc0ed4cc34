// SPDX-License-Identifier: MIT

#pragma once

#include <cstddef>
#include <string>

namespace dickman {

enum class Verdict { pass, fail, inconclusive };

// Outcome of checking one quantitative claim. For bound-style claims,
// `theoretical` is the exact bound and `empirical` the measured statistic;
// for fitted-constant claims, `theoretical` holds the fitted constant and
// `empirical` the maximum relative spread across the fitted sizes.
struct BoundReport {
    std::string claim_id;
    double theoretical = 0.0;
    double empirical = 0.0;
    double mc_stderr = 0.0;
    std::size_t samples_used = 0;
    double slack = 0.0;  // certified bias budget of the reference batch
    Verdict verdict = Verdict::inconclusive;
};

// fail when empirical > theoretical + 5*mc_stderr + slack; otherwise
// inconclusive when the noise dwarfs a positive bound (mc_stderr >
// theoretical/2); otherwise pass. Zero-valued bounds (paired identity
// checks) are never inconclusive: the 5-sigma test is the decision.
Verdict assess_bound(double theoretical, double empirical, double mc_stderr, double slack);

const char* verdict_name(Verdict v);

// Single-line JSON record with keys claim_id, theoretical, empirical,
// mc_stderr, samples, verdict.
std::string to_json(const BoundReport& report);

}  // namespace dickman
