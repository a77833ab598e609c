#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "supercube/supercube.hpp"

using namespace supercube;

namespace {

const char* kGoodConfig = R"(# sample
suites = identities
seed = 9

[matrix pair]
n1 = 1
rows = 1 0.5 ; 0.5 1
)";

std::string strip_timing(const std::string& text) {
    std::string out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        if (line.rfind("time-ms", 0) != 0) out += line + "\n";
        pos = end + 1;
    }
    return out;
}

}  // namespace

TEST_CASE("config parsing accepts the documented format") {
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(kGoodConfig, ".", errors);
    REQUIRE(errors.empty());
    REQUIRE(cfg.suites == std::vector<std::string>{"identities"});
    REQUIRE(cfg.seed == 9);
    REQUIRE(cfg.matrices.size() == 1);
    REQUIRE(cfg.matrices[0].name == "pair");
    REQUIRE(cfg.matrices[0].n1 == 1);
    REQUIRE(cfg.matrices[0].matrix(0, 1) == 0.5);
}

TEST_CASE("config parsing collects field-level errors") {
    const char* bad = R"(suites = gci, no-such-suite
seed = notanumber
bogus-key = 1
tau-grid = 0.5 2.0

[matrix broken]
n1 = 3
rows = 1 0.5 ; 0.5
)";
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(bad, ".", errors);
    REQUIRE(errors.size() >= 5);
    auto has = [&](const char* needle) {
        for (const std::string& e : errors)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    };
    REQUIRE(has("no-such-suite"));
    REQUIRE(has("seed"));
    REQUIRE(has("bogus-key"));
    REQUIRE(has("tau-grid"));
    REQUIRE(has("broken"));
}

TEST_CASE("config requires matrices for the matrix-driven suites") {
    std::vector<std::string> errors;
    parse_config("suites = gci\n", ".", errors);
    REQUIRE_FALSE(errors.empty());
}

TEST_CASE("config rejects asymmetric matrices and bad splits") {
    const char* cfgtext = R"(suites = gci
[matrix a]
n1 = 2
rows = 1 0.5 ; 0.5 1
[matrix b]
n1 = 1
rows = 1 0.5 ; 0.499999 1
)";
    std::vector<std::string> errors;
    parse_config(cfgtext, ".", errors);
    auto has = [&](const char* needle) {
        for (const std::string& e : errors)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    };
    REQUIRE(has("a: n1 must be smaller"));
    REQUIRE(has("b: not symmetric"));
}

TEST_CASE("matrices load from CSV files") {
    const char* path = "harness_test_matrix.csv";
    {
        std::ofstream out(path);
        out << "# comment\n1, 0.25\n0.25, 1\n";
    }
    std::string cfgtext = std::string("suites = gci\n[matrix filed]\nn1 = 1\nfile = ") + path + "\n";
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(cfgtext, ".", errors);
    REQUIRE(errors.empty());
    REQUIRE(cfg.matrices.size() == 1);
    REQUIRE(cfg.matrices[0].matrix(1, 0) == 0.25);
    std::remove(path);
}

TEST_CASE("ensemble generation is deterministic, unit-diagonal, positive definite") {
    auto a = generate_ensemble(4, 2, 50, 1234);
    auto b = generate_ensemble(4, 2, 50, 1234);
    REQUIRE(a.size() == 50);
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].matrix == b[i].matrix);
        REQUIRE(cholesky(a[i].matrix).has_value());
        for (int d = 0; d < 4; ++d) REQUIRE(a[i].matrix(d, d) == 1.0);
    }
    auto c = generate_ensemble(4, 2, 50, 99);
    REQUIRE_FALSE(a[0].matrix == c[0].matrix);
    REQUIRE_THROWS_AS(generate_ensemble(4, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("identities suite passes and reports deterministically") {
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(kGoodConfig, ".", errors);
    REQUIRE(errors.empty());

    ReportDocument first = run_suite(cfg);
    REQUIRE(first.all_pass());
    REQUIRE(first.records.size() == 9);

    ReportDocument second = run_suite(cfg);
    REQUIRE(strip_timing(first.to_text(true)) == strip_timing(second.to_text(true)));
    REQUIRE(first.to_text(false) == second.to_text(false));
}

TEST_CASE("parallel execution produces the identical report") {
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(kGoodConfig, ".", errors);
    REQUIRE(errors.empty());
    cfg.jobs = 1;
    ReportDocument serial = run_suite(cfg);
    cfg.jobs = 4;
    ReportDocument parallel = run_suite(cfg);
    REQUIRE(serial.to_text(false) == parallel.to_text(false));
}

TEST_CASE("report text carries the config digest and record anatomy") {
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(kGoodConfig, ".", errors);
    ReportDocument doc = run_suite(cfg);
    const std::string text = doc.to_text(true);
    REQUIRE(text.find("config-digest = " + config_digest_hex(cfg.raw_text)) != std::string::npos);
    REQUIRE(text.find("[check identities/anticommutativity]") != std::string::npos);
    REQUIRE(text.find("anchor = ") != std::string::npos);
    REQUIRE(text.find("status = pass") != std::string::npos);
    REQUIRE(text.find("summary = 9 pass, 0 fail") != std::string::npos);
    // Identical bytes, identical digest; a changed byte changes it.
    REQUIRE(config_digest_hex(cfg.raw_text) == config_digest_hex(cfg.raw_text));
    REQUIRE(config_digest_hex(cfg.raw_text) != config_digest_hex(cfg.raw_text + " "));
}

TEST_CASE("gci records embed a tau profile and profiles extract to csv") {
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(kGoodConfig, ".", errors);
    cfg.suites = {"gci"};
    cfg.profile_points = 5;
    cfg.qmc_points = 512;
    cfg.qmc_randomizations = 8;
    ReportDocument doc = run_suite(cfg);
    REQUIRE(doc.all_pass());
    const std::string csv = profiles_to_csv(doc);
    REQUIRE(csv.rfind("check,tau,value,abs_error\n", 0) == 0);
    // Header plus five profile rows.
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    REQUIRE(lines == 6);
    REQUIRE(csv.find("gci/pair,0.25,") != std::string::npos);
}

TEST_CASE("a failing check flips the document status") {
    // A decomposition on a four-variable matrix is recorded as a failure (the
    // quadrature-grade derivative needs n <= 3), and the run continues.
    std::string text = R"(suites = decomposition
tau-grid = 0.5
[matrix big]
n1 = 2
rows = 1 0 0 0 ; 0 1 0 0 ; 0 0 1 0 ; 0 0 0 1
)";
    std::vector<std::string> errors;
    RunConfig cfg = parse_config(text, ".", errors);
    REQUIRE(errors.empty());
    ReportDocument doc = run_suite(cfg);
    REQUIRE(doc.records.size() == 1);
    REQUIRE_FALSE(doc.all_pass());
    REQUIRE(doc.failed() == 1);
}
