#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "supercube/probability.hpp"
#include "supercube/random_matrices.hpp"
#include "supercube/super.hpp"

using namespace supercube;

namespace {

Matrix<double> corr2(double rho) {
    Matrix<double> c(2, 2);
    c(0, 0) = c(1, 1) = 1.0;
    c(0, 1) = c(1, 0) = rho;
    return c;
}

constexpr double kOneDim = 0.682689492137086;  // P[|Z| <= 1]

}  // namespace

TEST_CASE("normal quantile inverts the CDF across the unit interval") {
    for (double p = 1e-12; p < 1.0; p = p < 0.1 ? p * 3.7 : p + 0.037) {
        const double x = normal_quantile(p);
        REQUIRE(normal_cdf(x) == Catch::Approx(p).epsilon(1e-12).margin(1e-15));
    }
    REQUIRE_THROWS_AS(normal_quantile(-0.1), std::domain_error);
}

TEST_CASE("sobol direction numbers stratify every dimension") {
    // First 256 points of a valid base-2 sequence hit each length-1/256 cell
    // exactly once, in every coordinate.
    auto dirs = ScrambledSobol::direction_numbers(16);
    for (int d = 0; d < 16; ++d) {
        std::vector<bool> seen(256, false);
        std::uint32_t state = 0;
        for (int i = 0; i < 256; ++i) {
            if (i > 0) {
                const int c = std::countr_zero(~static_cast<std::uint32_t>(i - 1));
                state ^= dirs[static_cast<size_t>(d)][static_cast<size_t>(c)];
            }
            const int cell = static_cast<int>(state >> 24);
            REQUIRE_FALSE(seen[static_cast<size_t>(cell)]);
            seen[static_cast<size_t>(cell)] = true;
        }
    }
}

TEST_CASE("scrambled sobol points stay in the open unit cube and integrate a product") {
    ScrambledSobol sobol(5, 99, 0);
    std::vector<double> u;
    double acc = 0.0;
    const int points = 4096;
    for (int i = 0; i < points; ++i) {
        sobol.next(u);
        double prod = 1.0;
        for (double v : u) {
            REQUIRE(v > 0.0);
            REQUIRE(v < 1.0);
            prod *= v;
        }
        acc += prod;
    }
    // integral of u1...u5 over the cube = 2^-5
    REQUIRE(acc / points == Catch::Approx(0.03125).margin(2e-4));
}

TEST_CASE("one-dimensional cube probability matches the CDF difference") {
    Matrix<double> c1(1, 1);
    c1(0, 0) = 1.0;
    ProbabilityEstimate p = rectangle_probability_quadrature(c1, 1e-9);
    REQUIRE(p.value == Catch::Approx(kOneDim).margin(1e-8));

    c1(0, 0) = 2.25;  // sd 1.5
    ProbabilityEstimate q = rectangle_probability_quadrature(c1, 1e-9);
    REQUIRE(q.value == Catch::Approx(normal_interval(-1.0 / 1.5, 1.0 / 1.5)).margin(1e-10));
}

TEST_CASE("independent coordinates factorize exactly") {
    CovarianceInterpolation<double> ci(corr2(0.0), 1);
    ProbabilityEstimate p = cube_probability(ci, 0.7);
    REQUIRE(p.value == Catch::Approx(kOneDim * kOneDim).margin(1e-8));

    // tau = 0 factorizes any covariance across the split.
    CovarianceInterpolation<double> cj(corr2(0.62), 1);
    ProbabilityEstimate p0 = cube_probability(cj, 0.0);
    REQUIRE(p0.value == Catch::Approx(kOneDim * kOneDim).margin(1e-8));

    Matrix<double> c3(3, 3);
    c3(0, 0) = c3(1, 1) = c3(2, 2) = 1.0;
    c3(0, 1) = c3(1, 0) = 0.4;  // inside the first block after split at 2
    CovarianceInterpolation<double> ck(c3, 2);
    ProbabilityEstimate pj = cube_probability(ck, 0.0);
    ProbabilityEstimate pb = rectangle_probability_quadrature(ck.matrix().submatrix(0b011, 0b011), 1e-9);
    REQUIRE(pj.value == Catch::Approx(pb.value * kOneDim).margin(1e-8));
}

TEST_CASE("qmc and quadrature agree through dimension three") {
    for (double rho : {0.3, 0.6}) {
        Matrix<double> c3(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c3(i, j) = i == j ? 1.0 : rho;
        QmcSpec spec;
        spec.seed = 2024;
        ProbabilityEstimate qmc = rectangle_probability_qmc(c3, spec);
        ProbabilityEstimate quad = rectangle_probability_quadrature(c3, 1e-10);
        REQUIRE(std::fabs(qmc.value - quad.value) <= qmc.abs_error + 1e-9);
    }
}

TEST_CASE("qmc reproduces the product law in dimension five") {
    Matrix<double> c5 = Matrix<double>::identity(5);
    QmcSpec spec;
    spec.seed = 11;
    ProbabilityEstimate p = rectangle_probability_qmc(c5, spec);
    REQUIRE(p.value == Catch::Approx(std::pow(kOneDim, 5)).margin(3.0 * p.abs_error + 1e-6));
}

TEST_CASE("plain monte carlo agrees with quadrature at three sigma") {
    McSpec mc;
    mc.seed = 31;
    mc.samples = 400000;
    ProbabilityEstimate p = rectangle_probability_mc(corr2(0.5), mc);
    ProbabilityEstimate q = rectangle_probability_quadrature(corr2(0.5), 1e-10);
    REQUIRE(std::fabs(p.value - q.value) <= p.abs_error);
}

TEST_CASE("tau derivative: null, positive, and flip-symmetric cases") {
    CovarianceInterpolation<double> flat(corr2(0.0), 1);
    DerivativeEstimate d0 = tau_derivative(flat, 0.5);
    REQUIRE(std::fabs(d0.value) < 1e-7);

    CovarianceInterpolation<double> ci(corr2(0.5), 1);
    DerivativeEstimate d = tau_derivative(ci, 0.5);
    REQUIRE(d.value > 1e-3);

    // Sign flip of the cross block leaves the cube probability unchanged.
    CovarianceInterpolation<double> cneg(corr2(-0.5), 1);
    DerivativeEstimate dneg = tau_derivative(cneg, 0.5);
    REQUIRE(d.value == Catch::Approx(dneg.value).margin(1e-7));

    // Matched-grid finite differences agree with a direct independent stencil.
    auto direct = [&](double t) { return cube_probability(ci, t, {}, 1e-11).value; };
    const double fd = oracles::central_difference(direct, 0.5, 2e-4);
    REQUIRE(d.value == Catch::Approx(fd).margin(1e-6));

    // Endpoints use second-order one-sided stencils without leaving [0,1]:
    // the boundary value must line up with nearby interior derivatives.
    DerivativeEstimate dend = tau_derivative(ci, 1.0);
    DerivativeEstimate dnear = tau_derivative(ci, 0.999);
    REQUIRE(dend.value > 0.0);
    REQUIRE(dend.value == Catch::Approx(dnear.value).margin(5e-4));
    REQUIRE(dend.value > tau_derivative(ci, 0.9).value);
    DerivativeEstimate dzero = tau_derivative(ci, 0.0);
    REQUIRE(dzero.value == Catch::Approx(0.0).margin(1e-4));  // derivative vanishes at tau = 0
    REQUIRE_THROWS_AS(tau_derivative(ci, 1.2), std::invalid_argument);
}

TEST_CASE("correlation inequality report on small matrices") {
    CovarianceInterpolation<double> ci(corr2(0.5), 1);
    GciReport rep = gci_check(ci, 11);
    REQUIRE(rep.inequality_pass);
    REQUIRE(rep.monotone_pass);
    REQUIRE(rep.gap > 0.01);
    REQUIRE(rep.joint.value == Catch::Approx(0.497971778).margin(1e-6));
    REQUIRE(rep.first.value * rep.second.value == Catch::Approx(kOneDim * kOneDim).margin(1e-8));

    // Block-diagonal: equality within tolerance.
    CovarianceInterpolation<double> cb(corr2(0.0), 1);
    GciReport flat = gci_check(cb, 5);
    REQUIRE(std::fabs(flat.gap) <= 1e-8);
    REQUIRE(flat.inequality_pass);
}

TEST_CASE("correlation inequality holds for a six-dimensional draw by qmc") {
    RngStream rng(77, "gci6");
    Matrix<double> c = random_correlation_matrix(6, rng);
    CovarianceInterpolation<double> ci(c, 3);
    QmcSpec spec;
    spec.seed = 5;
    spec.points = 2048;
    GciReport rep = gci_check(ci, 5, spec);
    REQUIRE(rep.inequality_pass);
    REQUIRE(rep.monotone_pass);
}

TEST_CASE("gamma probability: chi-squared anchors and the k = 1 reduction") {
    // One variable, k = 2: P[chi^2_2 <= 1] = 1 - e^{-1/2}.
    Matrix<double> c1(1, 1);
    c1(0, 0) = 1.0;
    McSpec mc;
    mc.seed = 17;
    mc.samples = 400000;
    ProbabilityEstimate p = sum_square_event_probability(c1, 2, mc);
    REQUIRE(std::fabs(p.value - oracles::chi2_cdf_2(1.0)) <= p.abs_error);

    // k = 1 is the Gaussian cube event.
    CovarianceInterpolation<double> ci(corr2(0.5), 1);
    GammaConfig gc(1, ci);
    ProbabilityEstimate pg = gamma_probability(gc, 1.0, mc);
    ProbabilityEstimate ref = cube_probability(ci, 1.0);
    REQUIRE(std::fabs(pg.value - ref.value) <= pg.abs_error + ref.abs_error);
}

TEST_CASE("gamma correlation inequality at small scale") {
    McSpec mc;
    mc.seed = 19;
    mc.samples = 300000;
    for (int k : {1, 2, 3}) {
        GammaConfig gc(k, CovarianceInterpolation<double>(corr2(0.7), 1));
        GammaGciReport rep = gamma_gci_check(gc, mc);
        REQUIRE(rep.inequality_pass);
        if (k == 2) REQUIRE(rep.gap > 0.0);
    }
    // Independence: gap compatible with zero.
    GammaConfig flat(2, CovarianceInterpolation<double>(corr2(0.0), 1));
    GammaGciReport rep = gamma_gci_check(flat, mc);
    REQUIRE(std::fabs(rep.gap) <= rep.gap_error);
}

TEST_CASE("boundary slice estimator: nonnegativity, anchor, and bandwidth stability") {
    // One variable, unit variance: the slice at J = {1} is exactly the
    // chi^2_3 density at 1.
    Matrix<double> c1(1, 1);
    c1(0, 0) = 1.0;
    BodyDensityEstimate one = boundary_integral_estimate(c1, SubsetIndex{0b01}, 0.02, 2000000, 321);
    REQUIRE(one.value >= 0.0);
    REQUIRE(std::fabs(one.value - oracles::chi2_pdf_3(1.0)) <= one.abs_error + 1e-3);

    Matrix<double> id2 = Matrix<double>::identity(2);
    CovarianceInterpolation<double> ci(id2, 1);

    // Independent coordinates: slice at J = {1} is the chi^2_3 density at 1
    // times the chi^2_3 mass of [0,1].
    const double anchor = oracles::chi2_pdf_3(1.0) * oracles::chi2_cdf_3(1.0);
    BodyDensityEstimate est = boundary_integral_estimate(ci, 0.3, SubsetIndex{0b01}, 0.02, 2000000, 123);
    REQUIRE(est.value >= 0.0);
    REQUIRE(est.enough_hits);
    REQUIRE(std::fabs(est.value - anchor) <= est.abs_error + 2e-3);

    // Shrinking bandwidths stay mutually consistent.
    CovarianceInterpolation<double> cr(corr2(0.5), 1);
    double prev = -1.0;
    for (double eps : {0.05, 0.02, 0.01}) {
        BodyDensityEstimate e = boundary_integral_estimate(cr, 0.5, SubsetIndex{0b01}, eps, 2000000, 7);
        if (prev >= 0.0) REQUIRE(std::fabs(e.value - prev) <= 3.0 * (e.abs_error + 1e-3));
        prev = e.value;
    }

    // Starved estimator flags itself.
    BodyDensityEstimate tiny = boundary_integral_estimate(ci, 0.3, SubsetIndex{0b11}, 0.005, 2000, 5);
    REQUIRE_FALSE(tiny.enough_hits);

    REQUIRE_THROWS_AS(boundary_integral_estimate(ci, 0.3, SubsetIndex{0}, 0.01, 10, 1),
                      std::invalid_argument);
}

TEST_CASE("derivative decomposition: trivial, two- and three-variable configurations") {
    // Independent blocks: both sides vanish.
    CovarianceInterpolation<double> flat(corr2(0.0), 1);
    DecompositionOptions small;
    small.slice_samples = 200000;
    DecompositionReport rep0 = decomposition_check(flat, 0.5, small);
    REQUIRE(rep0.agreement_pass);
    REQUIRE(std::fabs(rep0.lhs) < 1e-6);
    REQUIRE(std::fabs(rep0.rhs) < 1e-3);

    // The worked two-variable case.
    CovarianceInterpolation<double> ci(corr2(0.5), 1);
    DecompositionOptions opts;
    opts.slice_samples = 4000000;
    opts.seed = 2;
    DecompositionReport rep = decomposition_check(ci, 0.5, opts);
    REQUIRE(rep.agreement_pass);
    REQUIRE(rep.nonnegativity_pass);
    REQUIRE(rep.relative_gap < 0.10);

    // A three-variable configuration.
    RngStream rng(55, "decomp3");
    Matrix<double> c3 = random_correlation_matrix(3, rng);
    CovarianceInterpolation<double> ci3(c3, 1);
    DecompositionReport rep3 = decomposition_check(ci3, 0.3, opts);
    REQUIRE(rep3.agreement_pass);
    REQUIRE(rep3.nonnegativity_pass);

    REQUIRE_THROWS_AS(decomposition_check(ci, 0.0, opts), std::invalid_argument);
}

TEST_CASE("gamma decomposition diagnostic stays within its confidence band") {
    GammaConfig gc(2, CovarianceInterpolation<double>(corr2(0.5), 1));
    DecompositionOptions opts;
    opts.slice_samples = 2000000;
    opts.seed = 4;
    DecompositionReport rep = gamma_decomposition_diagnostic(gc, 0.5, opts, 2000000);
    REQUIRE(rep.agreement_pass);
    REQUIRE(rep.nonnegativity_pass);
}

TEST_CASE("one-dimensional expectation matches the superspace reduction") {
    // E[F(X^2)] for X ~ N(0, c), by direct quadrature here, against the
    // superintegral side of reduction_check.
    for (double lambda : {0.5, 1.0}) {
        for (double c : {0.5, 2.0}) {
            auto integrand = [&](double x) {
                return std::exp(-0.5 * x * x / c) * std::exp(-lambda * x * x);
            };
            const double xmax = std::sqrt(2.0 * c / (1.0 + 2.0 * lambda * c)) * 10.0;
            QuadratureResult q = integrate_refining(integrand, 0.0, xmax, 1e-12, 12);
            const double expectation = 2.0 * q.value / std::sqrt(2.0 * std::numbers::pi * c);
            ReductionResult red = reduction_check(TestFunction::exponential(lambda), c, 1e-8);
            REQUIRE(expectation == Catch::Approx(red.rhs).margin(1e-8));
        }
    }
}
