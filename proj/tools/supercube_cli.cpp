// Command-line front end: `verify` runs configured check suites and writes a
// machine-readable report; `ensemble` prints reproducible random correlation
// matrices in config format.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
// config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supercube/supercube.hpp"

namespace {

int run_verify(const std::string& config_path, const std::vector<std::string>& suite_override,
               bool seed_set, std::uint64_t seed_override, const std::string& out_override,
               int jobs_override) {
    std::vector<std::string> errors;
    supercube::RunConfig cfg = supercube::parse_config_file(config_path, errors);
    if (!suite_override.empty()) cfg.suites = suite_override;
    if (seed_set) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out = out_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;

    // Re-validate the pieces an override can change.
    if (!errors.empty()) {
        std::cerr << "config errors:\n";
        for (const std::string& e : errors) std::cerr << "  - " << e << "\n";
        return 2;
    }
    for (const std::string& s : cfg.suites) {
        bool ok = false;
        for (const std::string& k : supercube::known_suites()) ok = ok || (k == s);
        if (!ok) {
            std::cerr << "config errors:\n  - suites: unknown suite '" << s << "'\n";
            return 2;
        }
    }

    supercube::ReportDocument doc = supercube::run_suite(cfg);
    const std::string text = doc.to_text(true);
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out);
        if (!out) {
            std::cerr << "cannot write report to '" << cfg.out << "'\n";
            return 2;
        }
        out << text;
        const std::string csv = supercube::profiles_to_csv(doc);
        if (csv.find('\n') != csv.size() - 1) {  // more than the header line
            std::ofstream profile(cfg.out + ".profiles.csv");
            profile << csv;
        }
        std::cout << "report written to " << cfg.out << " (" << doc.passed() << " pass, "
                  << doc.failed() << " fail)\n";
    }
    return doc.all_pass() ? 0 : 1;
}

int run_ensemble(int n, int n1, int count, std::uint64_t seed) {
    std::vector<supercube::MatrixSpec> specs;
    try {
        specs = supercube::generate_ensemble(n, n1, count, seed);
    } catch (const std::exception& e) {
        std::cerr << "ensemble: " << e.what() << "\n";
        return 2;
    }
    std::printf("# ensemble n=%d n1=%d count=%d seed=%llu\n", n, n1, count,
                static_cast<unsigned long long>(seed));
    for (const supercube::MatrixSpec& spec : specs) {
        std::printf("[matrix %s]\n", spec.name.c_str());
        std::printf("n1 = %d\n", spec.n1);
        std::string rows;
        for (int i = 0; i < spec.matrix.rows(); ++i) {
            if (i) rows += " ; ";
            for (int j = 0; j < spec.matrix.cols(); ++j) {
                if (j) rows += " ";
                rows += supercube::format_double(spec.matrix(i, j));
            }
        }
        std::printf("rows = %s\n\n", rows.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supersymmetric-calculus verification toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> suites;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_path;
    int jobs = 0;

    CLI::App* verify = app.add_subcommand("verify", "run verification suites from a config file");
    verify->add_option("--config", config_path, "config file path")->required();
    verify->add_option("--suite", suites, "suite name (repeatable; overrides the config)");
    verify->add_option("--seed", seed, "root seed override")->each([&](const std::string&) { seed_set = true; });
    verify->add_option("--out", out_path, "report output path override");
    verify->add_option("--jobs", jobs, "worker thread count (default: SUPERCUBE_JOBS or 1)");

    int en = 0, en1 = 0, ecount = 0;
    std::uint64_t eseed = 1;
    CLI::App* ensemble = app.add_subcommand("ensemble", "print a reproducible correlation-matrix ensemble");
    ensemble->add_option("--n", en, "matrix dimension")->required();
    ensemble->add_option("--n1", en1, "first block size")->required();
    ensemble->add_option("--count", ecount, "number of matrices")->required();
    ensemble->add_option("--seed", eseed, "ensemble seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify(config_path, suites, seed_set, seed, out_path, jobs);
        if (ensemble->parsed()) return run_ensemble(en, en1, ecount, eseed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
