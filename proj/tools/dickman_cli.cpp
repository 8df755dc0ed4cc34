// SPDX-License-Identifier: MIT
//
// Command line front end: batch generation, distance estimation, bound
// verification, equation-solution export, contraction certificates and
// prime-table management, emitting CSV (with `#` metadata lines) or
// newline-delimited JSON. Identical configuration and seed produce
// byte-identical output.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dickman/bound_report.hpp"
#include "dickman/dickman.hpp"
#include "dickman/metrics.hpp"
#include "dickman/prime_sums.hpp"
#include "dickman/primes.hpp"
#include "dickman/stein.hpp"
#include "dickman/utility.hpp"

namespace {

using namespace dickman;

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
    std::string output;
    std::string format = "csv";
    std::string table_cache;
};

struct UtilityOpts {
    std::string kind = "identity";
    double alpha = 2.0;
    double exponent = 0.5;
};

Utility make_utility(const UtilityOpts& u) {
    if (u.kind == "identity") return Utility::identity();
    if (u.kind == "exp") return Utility::exponential_cara(u.alpha);
    if (u.kind == "log") return Utility::log_shift();
    if (u.kind == "power") return Utility::power_mixture({{u.exponent, 1.0}});
    throw std::invalid_argument("unknown utility kind: " + u.kind);
}

void add_utility_flags(CLI::App* cmd, UtilityOpts& u) {
    cmd->add_option("--utility", u.kind, "Utility family: identity, exp, log, power")
        ->check(CLI::IsMember({"identity", "exp", "log", "power"}));
    cmd->add_option("--alpha", u.alpha, "Exponential utility decay rate (with --utility exp)");
    cmd->add_option("--exponent", u.exponent,
                    "Power utility exponent in (0, 1] (with --utility power)");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Flat key/value record rendered either as one JSON line or as a CSV
// header + row pair under a `#` metadata line. Every key and string value
// emitted here is a plain identifier, so no quoting or escaping is needed.
struct FlatRecord {
    std::vector<std::pair<std::string, std::string>> fields;
    void add(const std::string& k, const std::string& v) { fields.emplace_back(k, v); }
    void add(const std::string& k, double v) { fields.emplace_back(k, fmt(v)); }
    void add(const std::string& k, std::uint64_t v) {
        fields.emplace_back(k, std::to_string(v));
    }
    void add(const std::string& k, bool v) {
        fields.emplace_back(k, v ? std::string("true") : std::string("false"));
    }

    std::string csv(const std::string& meta) const {
        std::string header;
        std::string row;
        for (const auto& [k, v] : fields) {
            if (!header.empty()) {
                header += ",";
                row += ",";
            }
            header += k;
            row += v;
        }
        std::string out;
        if (!meta.empty()) out += "# " + meta + "\n";
        out += header + "\n" + row + "\n";
        return out;
    }

    std::string json() const {
        std::string body;
        for (const auto& [k, v] : fields) {
            if (!body.empty()) body += ",";
            body += "\"" + k + "\":" + render_value(v);
        }
        return "{" + body + "}\n";
    }

  private:
    static std::string render_value(const std::string& v) {
        if (v == "true" || v == "false") return v;
        if (!v.empty() && v.find_first_not_of("0123456789+-.eE") == std::string::npos) return v;
        return "\"" + v + "\"";
    }
};

void write_out(const GlobalOpts& g, const std::string& text) {
    if (g.output.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(g.output, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open output file " + g.output);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + g.output);
}

PrimeTable table_for(const GlobalOpts& g, std::uint64_t n) {
    if (!g.table_cache.empty()) return cached_prime_table(n, g.table_cache);
    return build_prime_table(n);
}

int run_sample(const GlobalOpts& g, const UtilityOpts& uopts, double theta, std::uint64_t depth,
               std::size_t samples) {
    const Utility u = make_utility(uopts);
    const DickmanSpec spec(theta, u);
    const SampleBatch batch = u.is_identity()
                                  ? sample_dtheta(theta, depth, samples, g.seed, g.threads)
                                  : sample_dtheta_s(spec, depth, samples, g.seed, g.threads);
    std::string out;
    out.reserve(batch.values.size() * 20 + 128);
    const double certified =
        batch.certified_d1 ? *batch.certified_d1 : recursion_d1_bound(theta, depth);
    if (g.format == "csv") {
        out += "# command=sample theta=" + fmt(theta) + " utility=" + u.tag() +
               " depth=" + std::to_string(depth) + " samples=" + std::to_string(samples) +
               " seed=" + std::to_string(g.seed) + " certified_d1=" + fmt(certified) + "\n";
        out += "value\n";
        for (double v : batch.values) {
            out += fmt(v);
            out += "\n";
        }
    } else {
        FlatRecord meta;
        meta.add("kind", std::string("sample-meta"));
        meta.add("theta", theta);
        meta.add("utility", u.tag());
        meta.add("depth", static_cast<std::uint64_t>(depth));
        meta.add("samples", static_cast<std::uint64_t>(samples));
        meta.add("seed", g.seed);
        meta.add("certified_d1", certified);
        out += meta.json();
        for (double v : batch.values) {
            out += "{\"value\":" + fmt(v) + "}\n";
        }
    }
    write_out(g, out);
    return 0;
}

int run_distance(const GlobalOpts& g, const UtilityOpts& uopts, double theta,
                 std::uint64_t depth_a, std::uint64_t depth_b, std::size_t samples, bool coupled,
                 std::size_t resamples) {
    const Utility u = make_utility(uopts);
    const DickmanSpec spec(theta, u);
    const std::uint64_t seed_b = coupled ? g.seed : g.seed ^ 0x9E3779B97F4A7C15ULL;
    const SampleBatch a = u.is_identity()
                              ? sample_dtheta(theta, depth_a, samples, g.seed, g.threads)
                              : sample_dtheta_s(spec, depth_a, samples, g.seed, g.threads);
    const SampleBatch b = u.is_identity()
                              ? sample_dtheta(theta, depth_b, samples, seed_b, g.threads)
                              : sample_dtheta_s(spec, depth_b, samples, seed_b, g.threads);
    const W1Result w = wasserstein1_empirical(a, b, resamples, g.seed ^ 0x1b007ULL, g.threads);
    const SmoothDistance sm =
        smooth_distance_lower(a, b, h11_dictionary(batch_quantiles(b, {0.25, 0.5, 0.75})));
    const double ks = ks_statistic(a, b);

    FlatRecord rec;
    rec.add("theta", theta);
    rec.add("utility", u.tag());
    rec.add("depth_a", static_cast<std::uint64_t>(depth_a));
    rec.add("depth_b", static_cast<std::uint64_t>(depth_b));
    rec.add("samples", static_cast<std::uint64_t>(samples));
    rec.add("seed", g.seed);
    rec.add("coupled", coupled);
    rec.add("w1", w.estimate);
    rec.add("w1_stderr", w.std_error);
    rec.add("smooth_lower", sm.value);
    rec.add("smooth_stderr", sm.std_error);
    rec.add("smooth_witness", sm.witness);
    rec.add("ks", ks);
    rec.add("ks_threshold_a001", ks_threshold(samples, samples, 0.001));
    write_out(g, g.format == "csv" ? rec.csv("command=distance") : rec.json());
    return 0;
}

int run_bound_check(const GlobalOpts& g, const UtilityOpts& uopts, const std::string& claim,
                    bool list, double theta, std::uint64_t n, std::uint64_t depth,
                    std::size_t samples, const std::string& marks) {
    if (list) {
        std::string out;
        for (const ClaimInfo& info : list_claims()) {
            if (g.format == "csv") {
                out += info.id + ": " + info.summary + "\n";
            } else {
                FlatRecord rec;
                rec.add("id", info.id);
                rec.add("summary", info.summary);
                out += rec.json();
            }
        }
        write_out(g, out);
        return 0;
    }
    if (claim.empty()) throw std::invalid_argument("bound-check needs --claim or --list");
    ClaimParams params;
    params.theta = theta;
    params.n = n;
    params.depth = depth;
    params.num_samples = samples;
    params.seed = g.seed;
    params.utility = make_utility(uopts);
    params.marks = marks;
    params.threads = g.threads;
    params.table_cache = g.table_cache;
    const BoundReport report = check_bound(claim, params);
    if (g.format == "csv") {
        FlatRecord rec;
        rec.add("claim_id", report.claim_id);
        rec.add("theoretical", report.theoretical);
        rec.add("empirical", report.empirical);
        rec.add("mc_stderr", report.mc_stderr);
        rec.add("samples_used", static_cast<std::uint64_t>(report.samples_used));
        rec.add("slack", report.slack);
        rec.add("verdict", std::string(verdict_name(report.verdict)));
        write_out(g, rec.csv("command=bound-check seed=" + std::to_string(g.seed)));
    } else {
        write_out(g, to_json(report) + "\n");
    }
    return report.verdict == Verdict::fail ? 1 : 0;
}

int run_prime_sum(const GlobalOpts& g, std::uint64_t n, const std::string& marks, bool coupling,
                  bool remainder, std::size_t samples) {
    const PrimeTable table = table_for(g, n);
    const PrimeMarkLaw law = parse_mark_law(marks);
    const double mu = mu_n(table, law);

    FlatRecord rec;
    rec.add("n", static_cast<std::uint64_t>(table.n()));
    rec.add("p_n", static_cast<std::uint64_t>(table.primes.back()));
    rec.add("marks", marks);
    rec.add("mu", mu);
    rec.add("drift", (mu - 1.0) * table.log_pn());
    if (coupling) {
        const CouplingSummary c = coupling_TU(table, law, samples, g.seed);
        rec.add("coupling_exact_mean_abs", c.exact_mean_abs_diff);
        rec.add("coupling_mc_mean_abs", c.mean_abs_diff);
        rec.add("coupling_mc_stderr", c.mc_stderr);
        rec.add("coupling_max_abs", c.max_abs_diff);
        if (law == PrimeMarkLaw::poisson_logratio) {
            rec.add("coupling_as_bound", logratio_coupling_bound(table));
        }
    }
    if (remainder) {
        if (law != PrimeMarkLaw::geometric) {
            throw std::invalid_argument("--remainder applies to geometric marks only");
        }
        const RemainderEstimate r =
            remainder_term(table, [](double x) { return 0.5 * x; }, samples, g.seed);
        rec.add("remainder_estimate", r.estimate);
        rec.add("remainder_stderr", r.mc_stderr);
        rec.add("remainder_envelope", r.envelope);
    }
    write_out(g, g.format == "csv" ? rec.csv("command=prime-sum seed=" + std::to_string(g.seed))
                                   : rec.json());
    return 0;
}

int run_stein(const GlobalOpts& g, const UtilityOpts& uopts, double theta, double epsilon,
              double x_max, const std::string& h_name, double hinge_b) {
    const DickmanSpec spec(theta, make_utility(uopts));
    SteinTestFn test = cos_test();
    if (h_name == "sin") test = sin_test();
    if (h_name == "hinge") test = hinge_test(hinge_b);
    const SteinSolution sol = solve_stein(spec, test, epsilon, x_max);
    if (g.format == "csv") {
        std::string out = "# residual_max=" + fmt(sol.residual_max) +
                          " center=" + fmt(sol.center) + " rho=" + fmt(sol.rho) +
                          " mu_hat=" + fmt(sol.mu_hat) + " test=" + sol.test_name + "\n";
        out += stein_solution_csv(sol);
        write_out(g, out);
    } else {
        FlatRecord rec;
        rec.add("theta", theta);
        rec.add("utility", sol.spec.utility.tag());
        rec.add("test", sol.test_name);
        rec.add("K", static_cast<std::uint64_t>(sol.K));
        rec.add("rho", sol.rho);
        rec.add("mu_hat", sol.mu_hat);
        rec.add("center", sol.center);
        rec.add("tail_bound", sol.tail_bound);
        rec.add("residual_max", sol.residual_max);
        rec.add("grid_points", static_cast<std::uint64_t>(sol.grid.size()));
        write_out(g, rec.json());
    }
    return 0;
}

int run_rho(const GlobalOpts& g, const UtilityOpts& uopts, double theta) {
    const DickmanSpec spec(theta, make_utility(uopts));
    const RhoBound r = rho_bound(spec);
    FlatRecord rec;
    rec.add("theta", theta);
    rec.add("utility", spec.utility.tag());
    rec.add("value", r.value);
    rec.add("certified", r.certified);
    rec.add("grid_sup", r.grid_sup);
    rec.add("certificate", r.certificate);
    write_out(g, g.format == "csv" ? rec.csv("command=rho") : rec.json());
    return 0;
}

int run_prime_table(const GlobalOpts& g, std::uint64_t n) {
    const PrimeTable table = table_for(g, n);
    FlatRecord rec;
    rec.add("n", static_cast<std::uint64_t>(table.n()));
    rec.add("p_n", static_cast<std::uint64_t>(table.primes.back()));
    rec.add("log_p_n", table.log_pn());
    rec.add("mu_geometric", table.mu_geometric);
    rec.add("mu_bernoulli", table.mu_bernoulli);
    write_out(g, g.format == "csv" ? rec.csv("command=prime-table") : rec.json());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Dickman sampling, distance bounds and equation solutions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand name

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Base seed (default: DICKMAN_SEED env var, else 0)")
        ->each([&g](const std::string&) { g.seed_given = true; });
    app.add_option("--threads", g.threads, "Worker thread cap (0 = hardware default)");
    app.add_option("--output,-o", g.output, "Output file (default: stdout)");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--table-cache", g.table_cache, "Prime table cache file");

    UtilityOpts uopts;
    double theta = 1.0;
    std::uint64_t depth = 40;
    std::uint64_t n = 100;
    std::size_t samples = 100000;

    CLI::App* sample = app.add_subcommand("sample", "Generate recursion samples");
    sample->add_option("--theta", theta, "Family weight")->check(CLI::PositiveNumber);
    sample->add_option("--depth", depth, "Recursion depth");
    sample->add_option("--samples", samples, "Number of samples");
    add_utility_flags(sample, uopts);

    std::uint64_t depth_a = 10;
    std::uint64_t depth_b = 40;
    bool coupled = false;
    std::size_t resamples = 200;
    CLI::App* distance = app.add_subcommand("distance", "Distances between two sampled depths");
    distance->add_option("--theta", theta, "Family weight")->check(CLI::PositiveNumber);
    distance->add_option("--depth-a", depth_a, "First recursion depth");
    distance->add_option("--depth-b", depth_b, "Second recursion depth");
    distance->add_option("--samples", samples, "Samples per batch");
    distance->add_flag("--coupled", coupled, "Share the seed between both batches");
    distance->add_option("--resamples", resamples, "Bootstrap replicas for the W1 noise scale");
    add_utility_flags(distance, uopts);

    std::string claim;
    bool list_flag = false;
    std::string marks = "geometric";
    CLI::App* bound = app.add_subcommand("bound-check", "Verify a shipped distance bound");
    bound->add_option("--claim", claim, "Claim id (see --list)");
    bound->add_flag("--list", list_flag, "List claim ids and summaries");
    bound->add_option("--theta", theta, "Family weight")->check(CLI::PositiveNumber);
    bound->add_option("--n", n, "Number of summands / primes");
    bound->add_option("--depth", depth, "Recursion depth for decay claims");
    bound->add_option("--samples", samples, "Monte Carlo sample count");
    bound->add_option("--marks", marks, "Mark family for size-bias claims");
    add_utility_flags(bound, uopts);

    bool coupling = false;
    bool remainder = false;
    CLI::App* prime_sum = app.add_subcommand("prime-sum", "Prime-indexed sum diagnostics");
    prime_sum->add_option("--n", n, "Number of primes")->required();
    prime_sum->add_option("--marks", marks, "Mark family");
    prime_sum->add_flag("--coupling", coupling, "Add size-bias coupling statistics");
    prime_sum->add_flag("--remainder", remainder, "Add the geometric remainder estimate");
    prime_sum->add_option("--samples", samples, "Monte Carlo sample count");

    double epsilon = 1e-6;
    double x_max = 10.0;
    std::string h_name = "cos";
    double hinge_b = 1.0;
    CLI::App* stein = app.add_subcommand("stein", "Solve the characterizing equation");
    stein->add_option("--theta", theta, "Family weight")->check(CLI::PositiveNumber);
    stein->add_option("--epsilon", epsilon, "Series tail target");
    stein->add_option("--x-max", x_max, "Grid upper end");
    stein->add_option("--test-fn", h_name, "Test function")
        ->check(CLI::IsMember({"cos", "sin", "hinge"}));
    stein->add_option("--hinge-b", hinge_b, "Hinge kink location (with --test-fn hinge)");
    add_utility_flags(stein, uopts);

    CLI::App* rho = app.add_subcommand("rho", "Contraction constant certificate");
    rho->add_option("--theta", theta, "Family weight")->check(CLI::PositiveNumber);
    add_utility_flags(rho, uopts);

    CLI::App* ptable = app.add_subcommand("prime-table", "Build or load a prime table");
    ptable->add_option("--n", n, "Number of primes")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (!g.seed_given) {
        if (const char* env = std::getenv("DICKMAN_SEED")) {
            try {
                g.seed = std::stoull(env);
            } catch (const std::exception&) {
                std::cerr << "error: DICKMAN_SEED is not a valid integer\n";
                return 2;
            }
        }
    }

    try {
        if (sample->parsed()) return run_sample(g, uopts, theta, depth, samples);
        if (distance->parsed()) {
            return run_distance(g, uopts, theta, depth_a, depth_b, samples, coupled, resamples);
        }
        if (bound->parsed()) {
            return run_bound_check(g, uopts, claim, list_flag, theta, n, depth, samples, marks);
        }
        if (prime_sum->parsed()) {
            return run_prime_sum(g, n, marks, coupling, remainder, samples);
        }
        if (stein->parsed()) {
            return run_stein(g, uopts, theta, epsilon, x_max, h_name, hinge_b);
        }
        if (rho->parsed()) return run_rho(g, uopts, theta);
        if (ptable->parsed()) return run_prime_table(g, n);
        std::cerr << "error: no command given\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
