// SPDX-License-Identifier: MIT
//
// End-to-end checks of the command line tool: exit codes, reproducibility,
// metadata conventions and the claim listing. The binary path arrives via
// the DICKMAN_CLI_PATH compile definition.
#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"

#ifndef DICKMAN_CLI_PATH
#error "DICKMAN_CLI_PATH must point at the command line binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Runs the CLI with stderr folded into stdout and captures everything.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(DICKMAN_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.output.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) {
        if (c == '\n') ++n;
    }
    return n;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("help exits zero and names every command") {
        const RunResult r = run_cli("--help");
        CHECK(r.exit_code == 0);
        for (const char* cmd : {"sample", "distance", "bound-check", "prime-sum", "stein",
                                "rho", "prime-table"}) {
            CAPTURE(cmd);
            CHECK(r.output.find(cmd) != std::string::npos);
        }
    }

    TEST_CASE("usage errors exit two with a single stderr line") {
        for (const char* bad : {"", "frobnicate", "sample --theta -1", "sample --nope 3",
                                "prime-sum", "bound-check", "bound-check --claim no-such-claim",
                                "prime-sum --n 50 --marks bernoulli --remainder"}) {
            CAPTURE(bad);
            const RunResult r = run_cli(bad);
            CHECK(r.exit_code == 2);
            CHECK(count_lines(r.output) == 1);
            CHECK(r.output.find("error") != std::string::npos);
        }
    }

    TEST_CASE("sample output is byte identical across repeat runs") {
        const std::string args = "sample --theta 1 --depth 12 --samples 200 --seed 7";
        const RunResult a = run_cli(args);
        const RunResult b = run_cli(args);
        CHECK(a.exit_code == 0);
        CHECK(a.output == b.output);
        CHECK(a.output.rfind("# command=sample", 0) == 0);
        CHECK(a.output.find("seed=7") != std::string::npos);
        // One metadata line, one header, one row per sample.
        CHECK(count_lines(a.output) == 202);
        const RunResult other = run_cli("sample --theta 1 --depth 12 --samples 200 --seed 8");
        CHECK(other.output != a.output);
    }

    TEST_CASE("seed falls back to DICKMAN_SEED and then to zero") {
        const RunResult via_flag = run_cli("sample --depth 8 --samples 50 --seed 99");
        setenv("DICKMAN_SEED", "99", 1);  // popen children inherit this
        const RunResult via_env = run_cli("sample --depth 8 --samples 50");
        unsetenv("DICKMAN_SEED");
        const RunResult via_default = run_cli("sample --depth 8 --samples 50");
        const RunResult zero = run_cli("sample --depth 8 --samples 50 --seed 0");
        CHECK(via_env.output == via_flag.output);
        CHECK(via_default.output == zero.output);
        CHECK(via_flag.output != via_default.output);
    }

    TEST_CASE("bound check list names all claims and passes verdicts through exit codes") {
        const RunResult listed = run_cli("bound-check --list");
        CHECK(listed.exit_code == 0);
        for (const char* id :
             {"weighted-bernoulli", "poisson-sum", "recursion-decay", "utility-recursion",
              "utility-contraction", "prime-geometric", "prime-bernoulli",
              "prime-poisson-logratio", "size-bias"}) {
            CAPTURE(id);
            CHECK(listed.output.find(id) != std::string::npos);
        }

        const RunResult checked = run_cli(
            "bound-check --claim weighted-bernoulli --n 100 --samples 20000 --seed 7 "
            "--format json");
        CHECK(checked.exit_code == 0);
        CHECK(checked.output.find("\"claim_id\":\"weighted-bernoulli\"") != std::string::npos);
        CHECK(checked.output.find("0.0074999999999999997") != std::string::npos);
        CHECK(checked.output.find("\"verdict\":\"fail\"") == std::string::npos);
    }

    TEST_CASE("rho prints the closed form value with its certificate") {
        const RunResult r = run_cli("rho --utility exp --alpha 2 --theta 1");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("0.5") != std::string::npos);
        CHECK(r.output.find("concave:theta/(theta+1)") != std::string::npos);

        const RunResult json = run_cli("rho --utility log --theta 2 --format json");
        CHECK(json.exit_code == 0);
        CHECK(json.output.find("\"value\":0.66666666666666") != std::string::npos);
        CHECK(json.output.find("\"certified\":true") != std::string::npos);
    }

    TEST_CASE("prime table and prime sum agree on the drift column") {
        const RunResult table = run_cli("prime-table --n 200 --format json");
        CHECK(table.exit_code == 0);
        CHECK(table.output.find("\"n\":200") != std::string::npos);
        CHECK(table.output.find("\"p_n\":1223") != std::string::npos);

        const RunResult sum = run_cli("prime-sum --n 200 --marks geometric --format json");
        CHECK(sum.exit_code == 0);
        CHECK(sum.output.find("\"mu\":") != std::string::npos);
        CHECK(sum.output.find("\"drift\":-0.5") != std::string::npos);

        const RunResult coupled = run_cli(
            "prime-sum --n 200 --marks poisson-logratio --coupling --samples 2000 --seed 3 "
            "--format json");
        CHECK(coupled.exit_code == 0);
        CHECK(coupled.output.find("coupling_as_bound") != std::string::npos);
    }

    TEST_CASE("distance command reports coupled contraction") {
        const RunResult r = run_cli(
            "distance --theta 1 --depth-a 6 --depth-b 36 --samples 4000 --coupled --seed 5 "
            "--format json");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("\"coupled\":true") != std::string::npos);
        // Coupled W1 at depth 6 vs 36 sits near 2^-6; far below the
        // independent noise floor it would show without coupling.
        const std::size_t pos = r.output.find("\"w1\":");
        REQUIRE(pos != std::string::npos);
        const double w1 = std::strtod(r.output.c_str() + pos + 5, nullptr);
        CHECK(w1 > 0.5 * 0.015625);
        CHECK(w1 < 2.0 * 0.015625);
    }

    TEST_CASE("stein export writes grid rows with metadata") {
        const RunResult r = run_cli("stein --theta 1 --epsilon 1e-4 --x-max 4 --format json");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("\"test\":\"cos\"") != std::string::npos);
        CHECK(r.output.find("\"residual_max\":") != std::string::npos);

        const RunResult csv = run_cli("stein --theta 1 --epsilon 1e-4 --x-max 4");
        CHECK(csv.exit_code == 0);
        CHECK(csv.output.rfind("# residual_max=", 0) == 0);
        CHECK(csv.output.find("x,f,f_prime,f_double_prime") != std::string::npos);
    }
}
