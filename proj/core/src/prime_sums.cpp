// SPDX-License-Identifier: MIT

#include "dickman/prime_sums.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dickman/inversion.hpp"
#include "dickman/kahan.hpp"
#include "dickman/parallel.hpp"
#include "dickman/rng.hpp"

namespace dickman {
namespace {

// Per-k sampling parameters for one mark family: `param` is the head
// probability (geometric/Bernoulli) or the Poisson intensity; `exp_neg`
// caches exp(-lambda) for the Poisson families.
struct LawTables {
    PrimeMarkLaw law;
    std::vector<double> param;
    std::vector<double> exp_neg;
};

LawTables make_law_tables(const PrimeTable& table, PrimeMarkLaw law) {
    const std::size_t n = table.primes.size();
    LawTables t;
    t.law = law;
    t.param.resize(n);
    switch (law) {
        case PrimeMarkLaw::geometric:
            for (std::size_t k = 0; k < n; ++k) {
                t.param[k] = 1.0 / static_cast<double>(table.primes[k]);
            }
            break;
        case PrimeMarkLaw::bernoulli:
            for (std::size_t k = 0; k < n; ++k) {
                t.param[k] = 1.0 / (1.0 + static_cast<double>(table.primes[k]));
            }
            break;
        case PrimeMarkLaw::poisson_inv:
            t.exp_neg.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                t.param[k] = 1.0 / (1.0 + static_cast<double>(table.primes[k]));
                t.exp_neg[k] = std::exp(-t.param[k]);
            }
            break;
        case PrimeMarkLaw::poisson_logratio:
            t.exp_neg.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                t.param[k] = k == 0 ? 1.0 : 1.0 - table.logs[k - 1] / table.logs[k];
                t.exp_neg[k] = std::exp(-t.param[k]);
            }
            break;
    }
    return t;
}

std::uint64_t draw_mark(CounterRng& rng, const LawTables& t, const PrimeTable& table,
                        std::size_t k) {
    const double u = rng.next_unit();
    switch (t.law) {
        case PrimeMarkLaw::geometric:
            if (u > t.param[k]) return 0;
            return static_cast<std::uint64_t>(std::floor(-std::log(u) / table.logs[k]));
        case PrimeMarkLaw::bernoulli:
            return u <= t.param[k] ? 1 : 0;
        case PrimeMarkLaw::poisson_inv:
        case PrimeMarkLaw::poisson_logratio:
            return poisson_inverse(u, t.param[k], t.exp_neg[k]);
    }
    return 0;
}

// Mark index from a uniform through breakpoints F_0..F_n: returns the
// 1-based j with F_{j-1} <= u < F_j.
std::size_t index_from_uniform(const std::vector<double>& breakpoints, double u) {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
    std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
    if (j == 0) j = 1;
    if (j >= breakpoints.size()) j = breakpoints.size() - 1;
    return j;
}

// integral_alpha^beta |u - c| du, valid for c anywhere relative to the
// interval: the antiderivative of |u - c| is (u-c)|u-c|/2.
double abs_gap_integral(double alpha, double beta, double c) {
    const double hi = beta - c;
    const double lo = alpha - c;
    return 0.5 * (hi * std::fabs(hi) - lo * std::fabs(lo));
}

double smooth_hinge_half(double x, double center) {
    constexpr double kDelta = 0.5;
    const double d = x - center;
    if (d <= -kDelta) return 0.0;
    if (d >= kDelta) return 0.5 * d;
    const double t = d + kDelta;
    return 0.5 * t * t / (4.0 * kDelta);
}

}  // namespace

PrimeMarkLaw parse_mark_law(const std::string& name) {
    if (name == "geometric") return PrimeMarkLaw::geometric;
    if (name == "bernoulli") return PrimeMarkLaw::bernoulli;
    if (name == "poisson-inv") return PrimeMarkLaw::poisson_inv;
    if (name == "poisson-logratio") return PrimeMarkLaw::poisson_logratio;
    throw std::invalid_argument("unknown mark law: " + name);
}

const char* mark_law_name(PrimeMarkLaw law) {
    switch (law) {
        case PrimeMarkLaw::geometric:
            return "geometric";
        case PrimeMarkLaw::bernoulli:
            return "bernoulli";
        case PrimeMarkLaw::poisson_inv:
            return "poisson-inv";
        case PrimeMarkLaw::poisson_logratio:
            return "poisson-logratio";
    }
    return "unknown";
}

SampleBatch sample_prime_sum(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                             std::uint64_t seed, unsigned threads) {
    const LawTables laws = make_law_tables(table, law);
    const std::size_t n = table.primes.size();
    const double log_pn = table.log_pn();

    SampleBatch batch;
    batch.values.resize(num_samples);
    batch.seed = seed;
    batch.depth_n = n;
    parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t x = draw_mark(rng, laws, table, k);
                if (x > 0) s += static_cast<double>(x) * table.logs[k];
            }
            batch.values[i] = s / log_pn;
        }
    });
    return batch;
}

double mu_n(const PrimeTable& table, PrimeMarkLaw law) {
    switch (law) {
        case PrimeMarkLaw::geometric:
            return table.mu_geometric;
        case PrimeMarkLaw::bernoulli:
        case PrimeMarkLaw::poisson_inv:
            return table.mu_bernoulli;
        case PrimeMarkLaw::poisson_logratio:
            return 1.0;
    }
    throw std::logic_error("mu_n: unknown mark law");
}

double mu_prefix(const PrimeTable& table, PrimeMarkLaw law, std::uint64_t k) {
    switch (law) {
        case PrimeMarkLaw::geometric:
            return table.mu_geometric_at(k);
        case PrimeMarkLaw::bernoulli:
        case PrimeMarkLaw::poisson_inv:
            return table.mu_bernoulli_at(k);
        case PrimeMarkLaw::poisson_logratio:
            if (k == 0 || k > table.n()) {
                throw std::invalid_argument("mu_prefix: k must lie in [1, n]");
            }
            return 1.0;
    }
    throw std::logic_error("mu_prefix: unknown mark law");
}

std::vector<double> coupling_breakpoints(const PrimeTable& table, PrimeMarkLaw law) {
    const std::size_t n = table.primes.size();
    switch (law) {
        case PrimeMarkLaw::geometric:
            return table.breakpoints;
        case PrimeMarkLaw::bernoulli:
        case PrimeMarkLaw::poisson_inv: {
            std::vector<double> f(n + 1);
            f[0] = 0.0;
            const double total = table.cum_bernoulli.back();
            for (std::size_t k = 0; k < n; ++k) f[k + 1] = table.cum_bernoulli[k] / total;
            f[n] = 1.0;
            return f;
        }
        case PrimeMarkLaw::poisson_logratio: {
            std::vector<double> f(n + 1);
            f[0] = 0.0;
            for (std::size_t k = 0; k < n; ++k) f[k + 1] = table.logs[k] / table.logs[n - 1];
            f[n] = 1.0;
            return f;
        }
    }
    throw std::logic_error("coupling_breakpoints: unknown mark law");
}

CouplingSummary coupling_TU(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                            std::uint64_t seed) {
    const std::vector<double> f = coupling_breakpoints(table, law);
    const double log_pn = table.log_pn();

    CouplingSummary out;
    out.t.resize(num_samples);
    out.u.resize(num_samples);
    for (std::size_t i = 0; i < num_samples; ++i) {
        CounterRng rng(seed, i);
        const double u = rng.next_unit();
        const std::size_t j = index_from_uniform(f, u);
        double t_val = table.logs[j - 1] / log_pn;
        if (law == PrimeMarkLaw::bernoulli) {
            const double q = 1.0 / (1.0 + static_cast<double>(table.primes[j - 1]));
            if (rng.next_unit() <= q) t_val = 0.0;
        }
        out.t[i] = t_val;
        out.u[i] = u;
    }

    KahanSum sum;
    KahanSum sum_sq;
    for (std::size_t i = 0; i < num_samples; ++i) {
        const double d = std::fabs(out.t[i] - out.u[i]);
        sum.add(d);
        sum_sq.add(d * d);
        out.max_abs_diff = std::max(out.max_abs_diff, d);
    }
    const double m = static_cast<double>(num_samples);
    out.mean_abs_diff = sum.value() / m;
    const double var =
        std::max(0.0, sum_sq.value() / m - out.mean_abs_diff * out.mean_abs_diff);
    out.mc_stderr = std::sqrt(var / m);
    out.exact_mean_abs_diff = exact_coupling_mean_abs(table, law);
    return out;
}

double exact_coupling_mean_abs(const PrimeTable& table, PrimeMarkLaw law) {
    const std::vector<double> f = coupling_breakpoints(table, law);
    const double log_pn = table.log_pn();
    KahanSum total;
    for (std::size_t j = 1; j < f.size(); ++j) {
        const double c = table.logs[j - 1] / log_pn;
        if (law == PrimeMarkLaw::bernoulli) {
            const double q = 1.0 / (1.0 + static_cast<double>(table.primes[j - 1]));
            total.add(q * abs_gap_integral(f[j - 1], f[j], 0.0));
            total.add((1.0 - q) * abs_gap_integral(f[j - 1], f[j], c));
        } else {
            total.add(abs_gap_integral(f[j - 1], f[j], c));
        }
    }
    return total.value();
}

double logratio_coupling_bound(const PrimeTable& table) {
    return std::log(2.0) / table.log_pn();
}

double bernoulli_removed_mass(const PrimeTable& table) {
    const double log_pn = table.log_pn();
    const double total = table.cum_bernoulli.back();
    KahanSum sum;
    for (std::size_t j = 0; j < table.primes.size(); ++j) {
        const double w = table.logs[j] / (1.0 + static_cast<double>(table.primes[j]));
        const double q = 1.0 / (1.0 + static_cast<double>(table.primes[j]));
        sum.add(w / total * q * table.logs[j] / log_pn);
    }
    return sum.value();
}

RemainderEstimate remainder_term(const PrimeTable& table,
                                 const std::function<double(double)>& phi,
                                 std::size_t num_samples, std::uint64_t seed) {
    const LawTables laws = make_law_tables(table, PrimeMarkLaw::geometric);
    const std::size_t n = table.primes.size();
    const double log_pn = table.log_pn();

    std::vector<double> values(num_samples);
    parallel_for(std::size_t{0}, num_samples, 0, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::pair<std::size_t, std::uint64_t>> hits;
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            hits.clear();
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t x = draw_mark(rng, laws, table, k);
                if (x > 0) {
                    s += static_cast<double>(x) * table.logs[k];
                    hits.emplace_back(k, x);
                }
            }
            s /= log_pn;
            const double phi_s = phi(s);
            double r = 0.0;
            for (const auto& [k, x] : hits) {
                const double weight = table.logs[k] / (static_cast<double>(table.primes[k]) - 1.0);
                r += weight * static_cast<double>(x) * (phi(s + table.logs[k] / log_pn) - phi_s);
            }
            values[i] = r / log_pn;
        }
    });

    RemainderEstimate out;
    KahanSum sum;
    KahanSum sum_sq;
    for (double v : values) {
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double m = static_cast<double>(num_samples);
    out.estimate = sum.value() / m;
    const double var = std::max(0.0, sum_sq.value() / m - out.estimate * out.estimate);
    out.mc_stderr = std::sqrt(var / m);
    out.envelope = remainder_envelope(table);
    return out;
}

double remainder_envelope(const PrimeTable& table) {
    KahanSum sum;
    for (std::size_t k = 0; k < table.primes.size(); ++k) {
        const double pm1 = static_cast<double>(table.primes[k]) - 1.0;
        sum.add(table.logs[k] * table.logs[k] / (pm1 * pm1));
    }
    const double log_pn = table.log_pn();
    return sum.value() / (2.0 * log_pn * log_pn);
}

std::vector<LipHalfFn> lip_half_dictionary(const std::vector<double>& hinge_centers) {
    std::vector<LipHalfFn> dict;
    dict.push_back({"x/2", [](double x) { return 0.5 * x; }});
    dict.push_back({"sin/2", [](double x) { return 0.5 * std::sin(x); }});
    dict.push_back({"cos/2", [](double x) { return 0.5 * std::cos(x); }});
    for (double c : hinge_centers) {
        char name[48];
        std::snprintf(name, sizeof(name), "hinge(%g)/2", c);
        dict.push_back({name, [c](double x) { return smooth_hinge_half(x, c); }});
    }
    return dict;
}

BoundReport size_bias_check(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                            std::uint64_t seed) {
    const LawTables laws = make_law_tables(table, law);
    const std::vector<double> f = coupling_breakpoints(table, law);
    const std::vector<LipHalfFn> dict = lip_half_dictionary();
    const std::size_t n = table.primes.size();
    const double log_pn = table.log_pn();
    const double mu = mu_n(table, law);
    const bool geometric = law == PrimeMarkLaw::geometric;
    const bool bernoulli = law == PrimeMarkLaw::bernoulli;

    std::vector<std::vector<double>> deviations(dict.size());
    for (auto& d : deviations) d.resize(num_samples);

    parallel_for(std::size_t{0}, num_samples, 0, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint64_t> marks(bernoulli ? n : 0);
        std::vector<std::pair<std::size_t, std::uint64_t>> hits;
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            hits.clear();
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t x = draw_mark(rng, laws, table, k);
                if (bernoulli) marks[k] = x;
                if (x > 0) {
                    s += static_cast<double>(x) * table.logs[k];
                    if (geometric) hits.emplace_back(k, x);
                }
            }
            s /= log_pn;

            const double u = rng.next_unit();
            const std::size_t j = index_from_uniform(f, u);
            double t_val = table.logs[j - 1] / log_pn;
            if (bernoulli && marks[j - 1] > 0) t_val = 0.0;

            for (std::size_t q = 0; q < dict.size(); ++q) {
                const auto& phi = dict[q].phi;
                double lhs = s * phi(s);
                double rhs = mu * phi(s + t_val);
                if (geometric) {
                    const double phi_s = phi(s);
                    double r = 0.0;
                    for (const auto& [k, x] : hits) {
                        const double weight =
                            table.logs[k] / (static_cast<double>(table.primes[k]) - 1.0);
                        r += weight * static_cast<double>(x) *
                             (phi(s + table.logs[k] / log_pn) - phi_s);
                    }
                    rhs += r / log_pn;
                }
                deviations[q][i] = lhs - rhs;
            }
        }
    });

    const double m = static_cast<double>(num_samples);
    double worst_ratio = -1.0;
    double worst_mean = 0.0;
    double worst_se = 0.0;
    bool any_fail = false;
    for (const auto& values : deviations) {
        KahanSum sum;
        KahanSum sum_sq;
        for (double v : values) {
            sum.add(v);
            sum_sq.add(v * v);
        }
        const double mean = sum.value() / m;
        const double var = std::max(0.0, sum_sq.value() / m - mean * mean);
        const double se = std::sqrt(var / m);
        const double ratio = se > 0.0 ? std::fabs(mean) / se
                                      : (mean == 0.0 ? 0.0 : 1e300);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_mean = std::fabs(mean);
            worst_se = se;
        }
        if (std::fabs(mean) > 5.0 * se) any_fail = true;
    }

    BoundReport report;
    report.claim_id = std::string("size-bias:") + mark_law_name(law);
    report.theoretical = 0.0;
    report.empirical = worst_mean;
    report.mc_stderr = worst_se;
    report.samples_used = num_samples;
    report.slack = 0.0;
    report.verdict = any_fail ? Verdict::fail : Verdict::pass;
    return report;
}

}  // namespace dickman
