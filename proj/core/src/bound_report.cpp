// SPDX-License-Identifier: MIT

#include "dickman/bound_report.hpp"

#include <cstdio>

namespace dickman {

Verdict assess_bound(double theoretical, double empirical, double mc_stderr, double slack) {
    if (empirical > theoretical + 5.0 * mc_stderr + slack) return Verdict::fail;
    if (theoretical > 0.0 && mc_stderr > 0.5 * theoretical) return Verdict::inconclusive;
    return Verdict::pass;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        case Verdict::inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

std::string to_json(const BoundReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"claim_id\":\"%s\",\"theoretical\":%.17g,\"empirical\":%.17g,"
                  "\"mc_stderr\":%.17g,\"samples\":%zu,\"verdict\":\"%s\"}",
                  report.claim_id.c_str(), report.theoretical, report.empirical,
                  report.mc_stderr, report.samples_used, verdict_name(report.verdict));
    return buf;
}

}  // namespace dickman
