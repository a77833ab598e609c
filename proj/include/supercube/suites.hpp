#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "supercube/config.hpp"
#include "supercube/covariance.hpp"
#include "supercube/grassmann.hpp"
#include "supercube/probability.hpp"
#include "supercube/random_matrices.hpp"
#include "supercube/report.hpp"
#include "supercube/super.hpp"

namespace supercube {

namespace detail {

struct CheckTask {
    std::string name;
    std::string anchor;
    std::string inputs;  // digest source: everything the check's result depends on
    std::function<void(ReportRecord&)> run;
};

inline std::string matrix_inputs(const MatrixSpec& m) {
    std::string s = m.name + " n1=" + std::to_string(m.n1) + " rows=";
    for (int i = 0; i < m.matrix.rows(); ++i)
        for (int j = 0; j < m.matrix.cols(); ++j) s += format_double(m.matrix(i, j)) + " ";
    return s;
}

inline GrassmannElement<Rational> random_element(const GeneratorRegistry& reg, RngStream& rng,
                                                 int max_terms = 6) {
    GrassmannElement<Rational> e(reg);
    const int terms = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_terms));
    for (int t = 0; t < terms; ++t) {
        const std::uint64_t mask = rng.next_u64() & reg.full_mask();
        e += GrassmannElement<Rational>::monomial(reg, mask, random_small_rational(rng));
    }
    return e;
}

// ---- identities ----------------------------------------------------------

inline void check_anticommutativity(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 300 && ok; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 6);
        GeneratorRegistry reg(n);
        const int gi = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()));
        const int hi = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()));
        auto g = GrassmannElement<Rational>::generator(reg, Generator{gi});
        auto h = GrassmannElement<Rational>::generator(reg, Generator{hi});
        if (gi == hi)
            ok = ext_mul(g, h).is_zero();
        else
            ok = ext_mul(g, h) == -ext_mul(h, g) && !ext_mul(g, h).is_zero();
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_product_laws(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 250 && ok; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        GeneratorRegistry reg(n);
        auto a = random_element(reg, rng);
        auto b = random_element(reg, rng);
        auto c = random_element(reg, rng);
        ok = ext_mul(ext_mul(a, b), c) == ext_mul(a, ext_mul(b, c));
        ok = ok && ext_mul(a + b, c) == ext_mul(a, c) + ext_mul(b, c);
        Rational s = random_small_rational(rng);
        ok = ok && ext_mul(s * a, b) == s * ext_mul(a, b);
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_derivative_sign_rule(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 250 && ok; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        GeneratorRegistry reg(n);
        // Homogeneous left factor of known degree.
        const int deg = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators() + 1));
        GrassmannElement<Rational> a(reg);
        for (int t = 0; t < 4; ++t) {
            std::uint64_t mask = 0;
            int placed = 0;
            for (int g = 0; g < reg.generators() && placed < deg; ++g) {
                const int remaining = reg.generators() - g;
                if (static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(remaining)) < deg - placed) {
                    mask |= std::uint64_t{1} << g;
                    ++placed;
                }
            }
            if (placed == deg) a += GrassmannElement<Rational>::monomial(reg, mask, random_small_rational(rng));
        }
        auto b = random_element(reg, rng);
        Generator g{static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()))};
        auto lhs = fermi_derive(ext_mul(a, b), g);
        auto rhs = ext_mul(fermi_derive(a, g), b);
        if (deg % 2 == 0)
            rhs += ext_mul(a, fermi_derive(b, g));
        else
            rhs -= ext_mul(a, fermi_derive(b, g));
        ok = lhs == rhs;
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_fermionic_determinant(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 60 && ok; ++it) {
        const int n = 1 + (it % 5);
        Matrix<Rational> sigma = random_rational_matrix(n, rng);
        ok = gaussian_fermionic_integral(sigma) == det_bareiss(sigma);
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_leibniz_expansion(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 40 && ok; ++it) {
        const int n = 1 + (it % 6);
        Matrix<Rational> a = random_rational_matrix(n, rng);
        ok = leibniz_check(a).equal;
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_q_closed(ReportRecord& rec, std::uint64_t) {
    bool ok = true;
    for (int n = 1; n <= 4 && ok; ++n) {
        SuperDerivation q(n);
        for (int i = 0; i < n && ok; ++i) ok = q.apply(q.closed_pair(i)).is_zero();
    }
    rec.add("pairs-checked", 1 + 2 + 3 + 4);
    rec.pass = ok;
}

inline void check_ward_seed(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 25 && ok; ++it) {
        const int n = 1 + (it % 4);
        SuperDerivation q(n);
        Matrix<Rational> sigma = random_symmetric_rational(n, rng);
        ok = q.apply(q.y_bilinear_eta(sigma)) == q.ward_seed_rhs(sigma);
        ++cases;
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

inline void check_indicator_reconstruction(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    bool ok = true;
    double worst_algebra = 0.0;
    double prev_mismatch = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        double mismatch = 0.0;
        for (int it = 0; it < 40; ++it) {
            const int n = 1 + static_cast<int>(rng.next_u64() % 3);
            GeneratorRegistry reg(n);
            std::vector<double> theta(static_cast<size_t>(n)), delta(static_cast<size_t>(n));
            double exact = 1.0;
            for (int i = 0; i < n; ++i) {
                // Off-boundary sample of B^2. Six bandwidths of clearance keep
                // the smoothed step within 1e-9 of the sharp one, so the 1e-6
                // convergence bar below is safe rather than seed-lucky.
                double b2 = rng.next_uniform() * 2.0;
                while (std::fabs(1.0 - b2) < 6.0 * eps) b2 = rng.next_uniform() * 2.0;
                const double arg = 1.0 - b2;
                theta[static_cast<size_t>(i)] = normal_cdf(arg / eps);
                delta[static_cast<size_t>(i)] = normal_pdf(arg / eps) / eps;
                exact *= arg > 0.0 ? 1.0 : 0.0;
            }
            // Engine product of the per-pair expansions ...
            GrassmannElement<double> product = GrassmannElement<double>::scalar(reg, 1.0);
            for (int i = 0; i < n; ++i) {
                GrassmannElement<double> factor =
                    GrassmannElement<double>::scalar(reg, theta[static_cast<size_t>(i)]);
                const std::uint64_t pm = (std::uint64_t{1} << reg.xi(i).index) |
                                         (std::uint64_t{1} << reg.eta(i).index);
                factor += GrassmannElement<double>::monomial(reg, pm, -2.0 * delta[static_cast<size_t>(i)]);
                product = ext_mul(product, factor);
            }
            // ... must agree with the subset-organized expansion term by term.
            GrassmannElement<double> organized(reg);
            for (const BoundaryTerm& term : indicator_expand(n)) {
                double weight = 1.0;
                for (int i = 0; i < n; ++i) {
                    if (term.delta_set & (std::uint32_t{1} << i))
                        weight *= delta[static_cast<size_t>(i)];
                    else
                        weight *= theta[static_cast<size_t>(i)];
                }
                for (const auto& [mask, coeff] : term.fermion_monomial.terms())
                    organized += GrassmannElement<double>::monomial(reg, mask, to_double(coeff) * weight);
            }
            for (const auto& [mask, coeff] : product.terms())
                worst_algebra = std::max(worst_algebra, std::fabs(coeff - organized.coefficient(mask)));
            for (const auto& [mask, coeff] : organized.terms())
                worst_algebra = std::max(worst_algebra, std::fabs(coeff - product.coefficient(mask)));
            mismatch = std::max(mismatch, std::fabs(product.scalar_part() - exact));
        }
        ok = ok && mismatch <= prev_mismatch + 1e-12;
        prev_mismatch = mismatch;
    }
    ok = ok && worst_algebra < 1e-12 && prev_mismatch < 1e-6;
    rec.add("max-term-mismatch", worst_algebra);
    rec.add("smoothing-residual-at-1e-3", prev_mismatch);
    rec.pass = ok;
}

inline void check_wick(ReportRecord& rec, std::uint64_t seed) {
    RngStream rng(seed, rec.name);
    int cases = 0;
    bool ok = true;
    for (int it = 0; it < 12 && ok; ++it) {
        const int n = 2 + (it % 3);
        Matrix<Rational> c = random_rational_pd(n, rng);
        const int n1 = 1 + (it % (n - 1));
        CovarianceInterpolation<Rational> ci(c, n1);
        for (const Rational& tau : {Rational(0), Rational(1, 3), Rational(1)}) {
            Matrix<Rational> ct = ci.interpolate(tau);
            for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n) && ok; ++mask) {
                SubsetIndex j{mask};
                Rational expect = wick_subset_expectation(ci, j, tau);
                Rational direct = principal_minor_det(ct, j);
                Rational scale(1);
                for (int b = 0; b < j.size(); ++b) scale = scale * Rational(2);
                ok = expect == scale * direct;
                ++cases;
            }
        }
    }
    rec.add("cases", cases);
    rec.pass = ok;
}

// ---- matrix-driven suites -------------------------------------------------

inline void check_lemma_a(ReportRecord& rec, const MatrixSpec& spec, std::uint64_t) {
    CovarianceInterpolation<double> ci(spec.matrix, spec.n1);
    const int n = ci.dim();
    double min_a = 1e300, max_route_gap = 0.0;
    bool ok = true;
    int points = 0;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        SubsetIndex j{mask};
        double prev_det = 1e300;
        for (int t = 0; t <= 100; ++t) {
            const double tau = t / 100.0;
            const double a = a_subset_analytic(ci, j, tau);
            const double b = a_subset_fermionic(ci, j, tau);
            min_a = std::min(min_a, a);
            max_route_gap = std::max(max_route_gap, std::fabs(a - b) / std::max(1.0, std::fabs(a)));
            const double d = principal_minor_det(ci.interpolate(tau), j);
            ok = ok && d <= prev_det + 1e-12;  // minor determinants shrink in tau
            prev_det = d;
            ++points;
        }
    }
    ok = ok && min_a >= -1e-12 && max_route_gap <= 1e-9;
    rec.add("grid-points", points);
    rec.add("min-a", min_a);
    rec.add("max-route-gap", max_route_gap);
    rec.pass = ok;
}

inline void check_gci(ReportRecord& rec, const MatrixSpec& spec, const RunConfig& cfg) {
    CovarianceInterpolation<double> ci(spec.matrix, spec.n1);
    QmcSpec qmc;
    qmc.seed = cfg.seed;
    qmc.points = cfg.qmc_points;
    qmc.randomizations = cfg.qmc_randomizations;
    qmc.label = "gci:" + spec.name;
    GciReport rep = gci_check(ci, cfg.profile_points, qmc, cfg.quad_tol);
    rec.add("p-joint", rep.joint.value);
    rec.add("p-joint-err", rep.joint.abs_error);
    rec.add("p-first", rep.first.value);
    rec.add("p-second", rep.second.value);
    rec.add("gap", rep.gap);
    rec.add("gap-err", rep.gap_error);
    rec.add("monotonicity-violations", rep.monotonicity_violations);
    rec.add("method", std::string(method_name(rep.joint.method)));
    std::string profile;
    for (const auto& [tau, est] : rep.profile) {
        if (!profile.empty()) profile += ";";
        profile += format_double(tau) + ":" + format_double(est.value) + ":" + format_double(est.abs_error);
    }
    rec.add("profile", profile);
    rec.budget = "qmc-points=" + format_u64(qmc.points) +
                 " randomizations=" + std::to_string(qmc.randomizations);
    rec.pass = rep.inequality_pass && rep.monotone_pass;
}

inline void check_gamma(ReportRecord& rec, const MatrixSpec& spec, int k, const RunConfig& cfg) {
    CovarianceInterpolation<double> ci(spec.matrix, spec.n1);
    GammaConfig gc(k, ci);
    McSpec mc;
    mc.seed = cfg.seed;
    mc.samples = cfg.mc_samples;
    mc.label = "gamma:" + spec.name + ":k" + std::to_string(k);
    GammaGciReport rep = gamma_gci_check(gc, mc);
    rec.add("k", k);
    rec.add("p-joint", rep.joint.value);
    rec.add("p-first", rep.first.value);
    rec.add("p-second", rep.second.value);
    rec.add("gap", rep.gap);
    rec.add("gap-3sigma", rep.gap_error);
    bool ok = rep.inequality_pass;
    if (k == 1) {
        // Same event as the Gaussian cube; cross-check against the
        // deterministic estimator.
        QmcSpec qmc;
        qmc.seed = cfg.seed;
        qmc.points = cfg.qmc_points;
        qmc.randomizations = cfg.qmc_randomizations;
        qmc.label = "gamma-ref:" + spec.name;
        ProbabilityEstimate ref = cube_probability(ci, 1.0, qmc, cfg.quad_tol);
        rec.add("gaussian-reference", ref.value);
        ok = ok && std::fabs(rep.joint.value - ref.value) <= rep.joint.abs_error + ref.abs_error;
    }
    rec.budget = "mc-samples=" + format_u64(mc.samples);
    rec.pass = ok;
}

inline void check_reduction_cell(ReportRecord& rec, double lambda, double c) {
    ReductionResult red = reduction_check(TestFunction::exponential(lambda), c, 1e-8);
    rec.add("lambda", lambda);
    rec.add("c", c);
    rec.add("reduction-lhs", red.lhs);
    rec.add("reduction-rhs", red.rhs);
    rec.add("analytic", red.analytic);
    rec.add("reduction-residual", red.residual);
    bool ok = red.pass;
    if (lambda > 0.0) {
        CheckResult loc = localization_check(TestFunction::exponential(lambda), c, 1e-8);
        rec.add("localization-value", loc.lhs);
        rec.add("localization-residual", loc.residual);
        ok = ok && loc.pass;
    } else {
        // No decay: the precondition must reject it.
        bool rejected = false;
        try {
            localization_check(TestFunction::exponential(0.0), c, 1e-8);
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        rec.add("localization-rejected", std::string(rejected ? "yes" : "no"));
        ok = ok && rejected;
    }
    rec.pass = ok;
}

inline void check_decomposition(ReportRecord& rec, const MatrixSpec& spec, double tau,
                                const RunConfig& cfg) {
    CovarianceInterpolation<double> ci(spec.matrix, spec.n1);
    if (ci.dim() > 3) {
        rec.add("note", std::string("skipped: decomposition needs n <= 3"));
        rec.pass = false;
        return;
    }
    DecompositionOptions opts;
    opts.slice_samples = cfg.slice_samples;
    opts.seed = cfg.seed;
    opts.fd_step = cfg.fd_step;
    opts.relative_tolerance = cfg.decomposition_rel_tol;
    DecompositionReport rep = decomposition_check(ci, tau, opts);
    rec.add("tau", tau);
    rec.add("lhs", rep.lhs);
    rec.add("lhs-err", rep.lhs_error);
    rec.add("rhs", rep.rhs);
    rec.add("rhs-3sigma", rep.rhs_error);
    rec.add("relative-gap", rep.relative_gap);
    for (const DecompositionRow& row : rep.rows) {
        std::string key = "J=" + std::to_string(row.subset);
        rec.add(key, "a=" + format_double(row.a_value) + " slice=" + format_double(row.slice) +
                         " summand=" + format_double(row.summand) + " hits=" + format_u64(row.hits) +
                         " eps=" + format_double(row.bandwidth) + (row.widened ? " widened" : ""));
    }
    rec.budget = "slice-samples=" + format_u64(opts.slice_samples);
    rec.pass = rep.agreement_pass && rep.nonnegativity_pass;
}

}  // namespace detail

inline int default_jobs_from_env() {
    if (const char* env = std::getenv("SUPERCUBE_JOBS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

/// Executes the configured suites in deterministic order; independent checks
/// may fan out over `jobs` threads, and the report is assembled in task order
/// regardless of completion order. Every record's randomness is derived from
/// (config seed, record name), so serial and parallel runs agree bit for bit.
inline ReportDocument run_suite(const RunConfig& cfg) {
    using detail::CheckTask;
    std::vector<CheckTask> tasks;
    const std::uint64_t seed = cfg.seed;

    const std::string seed_inputs = "seed=" + format_u64(seed);
    for (const std::string& suite : cfg.suites) {
        if (suite == "identities") {
            tasks.push_back({"identities/anticommutativity", "Grassmann generators anticommute and square to zero",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_anticommutativity(r, seed); }});
            tasks.push_back({"identities/product-laws", "exterior product associativity and bilinearity",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_product_laws(r, seed); }});
            tasks.push_back({"identities/derivative-sign-rule", "graded Leibniz rule of the left derivative",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_derivative_sign_rule(r, seed); }});
            tasks.push_back({"identities/fermionic-determinant", "fermionic Gaussian integral equals the determinant",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_fermionic_determinant(r, seed); }});
            tasks.push_back({"identities/leibniz-expansion", "det(I+A) equals one plus all principal minors",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_leibniz_expansion(r, seed); }});
            tasks.push_back({"identities/q-closed-pairs", "the squared-pair combination is annihilated by Q",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_q_closed(r, seed); }});
            tasks.push_back({"identities/ward-seed", "Q exchanges the mixed bilinear for its bosonic twin",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_ward_seed(r, seed); }});
            tasks.push_back({"identities/indicator-reconstruction", "super-hypercube indicator reassembles from boundary terms",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_indicator_reconstruction(r, seed); }});
            tasks.push_back({"identities/wick-subset", "subset Wick expectation equals scaled principal minor",
                             seed_inputs, [seed](ReportRecord& r) { detail::check_wick(r, seed); }});
        } else if (suite == "lemmaA") {
            for (const MatrixSpec& m : cfg.matrices)
                tasks.push_back({"lemmaA/" + m.name, "interpolated principal-minor derivative is nonnegative",
                                 detail::matrix_inputs(m),
                                 [m, seed](ReportRecord& r) { detail::check_lemma_a(r, m, seed); }});
        } else if (suite == "gci") {
            for (const MatrixSpec& m : cfg.matrices)
                tasks.push_back({"gci/" + m.name, "joint cube probability dominates the split product",
                                 detail::matrix_inputs(m) + " " + seed_inputs,
                                 [m, &cfg](ReportRecord& r) { detail::check_gci(r, m, cfg); }});
        } else if (suite == "gamma") {
            for (const MatrixSpec& m : cfg.matrices)
                for (int k : cfg.k_list)
                    tasks.push_back({"gamma/" + m.name + "/k" + std::to_string(k),
                                     "half-integer Gamma correlation inequality",
                                     detail::matrix_inputs(m) + " k=" + std::to_string(k) + " " + seed_inputs,
                                     [m, k, &cfg](ReportRecord& r) { detail::check_gamma(r, m, k, cfg); }});
        } else if (suite == "reduction") {
            for (double lambda : {0.0, 0.5, 1.0, 2.0})
                for (double c : {0.5, 1.0, 2.0}) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "reduction/lambda%g-c%g", lambda, c);
                    tasks.push_back({buf, "dimensional reduction and localization collapse",
                                     std::string(buf).substr(10),
                                     [lambda, c](ReportRecord& r) { detail::check_reduction_cell(r, lambda, c); }});
                }
        } else if (suite == "decomposition") {
            for (const MatrixSpec& m : cfg.matrices)
                for (double tau : cfg.tau_grid) {
                    if (!(tau > 0.0 && tau < 1.0)) continue;
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "tau%g", tau);
                    tasks.push_back({"decomposition/" + m.name + "/" + buf,
                                     "derivative splits into nonnegative boundary terms",
                                     detail::matrix_inputs(m) + " " + buf + " " + seed_inputs,
                                     [m, tau, &cfg](ReportRecord& r) { detail::check_decomposition(r, m, tau, cfg); }});
                }
        }
    }

    std::vector<ReportRecord> records(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i) {
        records[i].name = tasks[i].name;
        records[i].anchor = tasks[i].anchor;
        records[i].seed = seed;
        records[i].add("inputs-digest", config_digest_hex(tasks[i].inputs));
    }

    auto run_one = [&](size_t i) {
        const auto start = std::chrono::steady_clock::now();
        try {
            tasks[i].run(records[i]);
        } catch (const std::exception& e) {
            records[i].pass = false;
            records[i].add("error", std::string(e.what()));
        }
        records[i].time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
    };

    const int jobs = cfg.jobs >= 1 ? cfg.jobs : default_jobs_from_env();
    if (jobs <= 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        const int width = std::min<int>(jobs, static_cast<int>(tasks.size()));
        pool.reserve(static_cast<size_t>(width));
        for (int t = 0; t < width; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ReportDocument doc;
    doc.config_digest = config_digest_hex(cfg.raw_text);
    doc.seed = seed;
    doc.suites = cfg.suites;
    doc.records = std::move(records);
    return doc;
}

/// Extracts the tau profiles embedded in gci records as CSV rows
/// (check,tau,value,abs_error).
inline std::string profiles_to_csv(const ReportDocument& doc) {
    std::string csv = "check,tau,value,abs_error\n";
    for (const ReportRecord& rec : doc.records) {
        for (const auto& [k, v] : rec.values) {
            if (k != "profile") continue;
            std::string entry;
            for (size_t i = 0; i <= v.size(); ++i) {
                if (i == v.size() || v[i] == ';') {
                    if (!entry.empty()) {
                        std::string row = entry;
                        for (char& ch : row)
                            if (ch == ':') ch = ',';
                        csv += rec.name + "," + row + "\n";
                    }
                    entry.clear();
                } else {
                    entry += v[i];
                }
            }
        }
    }
    return csv;
}

}  // namespace supercube
