#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "supercube/grassmann.hpp"
#include "supercube/polynomial.hpp"
#include "supercube/random_matrices.hpp"

using namespace supercube;
using E = GrassmannElement<Rational>;

namespace {

E random_element(const GeneratorRegistry& reg, RngStream& rng, int max_terms = 6) {
    E e(reg);
    const int terms = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_terms));
    for (int t = 0; t < terms; ++t)
        e += E::monomial(reg, rng.next_u64() & reg.full_mask(), random_small_rational(rng));
    return e;
}

}  // namespace

TEST_CASE("generator products: anticommutation and nilpotency") {
    GeneratorRegistry reg(2);
    E xi1 = E::generator(reg, reg.xi(0));
    E eta1 = E::generator(reg, reg.eta(0));

    REQUIRE(ext_mul(xi1, eta1) == -ext_mul(eta1, xi1));
    REQUIRE(ext_mul(xi1, xi1).is_zero());

    // (1 + xi1 eta1)(1 + xi2 eta2) carries all four cross terms.
    E one = E::scalar(reg, Rational(1));
    E p1 = ext_mul(xi1, eta1);
    E p2 = ext_mul(E::generator(reg, reg.xi(1)), E::generator(reg, reg.eta(1)));
    E product = ext_mul(one + p1, one + p2);
    REQUIRE(product == one + p1 + p2 + ext_mul(p1, p2));
    REQUIRE(product.terms().size() == 4);
}

TEST_CASE("registry mismatch is a usage error") {
    GeneratorRegistry a(2), b(3);
    E ea = E::scalar(a, Rational(1));
    E eb = E::scalar(b, Rational(1));
    REQUIRE_THROWS_AS(ext_mul(ea, eb), std::invalid_argument);
}

TEST_CASE("left derivative: examples") {
    GeneratorRegistry reg(2);
    E xi1 = E::generator(reg, reg.xi(0));
    E eta1 = E::generator(reg, reg.eta(0));
    E pair = ext_mul(xi1, eta1);

    REQUIRE(fermi_derive(pair, reg.xi(0)) == eta1);
    REQUIRE(fermi_derive(E::generator(reg, reg.eta(1)), reg.xi(0)).is_zero());
    REQUIRE(fermi_derive(pair, reg.eta(0)) == -xi1);
}

TEST_CASE("berezin integral: signs, emptiness, and the exponential example") {
    GeneratorRegistry reg(1);
    E top = E::monomial(reg, 0b11, Rational(1));  // xi1 eta1

    std::vector<Generator> xi_eta{reg.xi(0), reg.eta(0)};
    std::vector<Generator> eta_xi{reg.eta(0), reg.xi(0)};
    REQUIRE(berezin_integrate(top, std::span<const Generator>(xi_eta)) == Rational(-1));
    REQUIRE(berezin_integrate(top, std::span<const Generator>(eta_xi)) == Rational(1));

    // No top monomial: the integral of a scalar vanishes.
    REQUIRE(berezin_integrate(E::scalar(reg, Rational(1))) == Rational(0));

    // exp(-xi eta) integrates to the 1x1 determinant.
    E exponent = E::monomial(reg, 0b11, Rational(-1));
    REQUIRE(berezin_integrate(ext_exp(exponent), std::span<const Generator>(xi_eta)) == Rational(1));
}

TEST_CASE("berezin integral validates its measure order") {
    GeneratorRegistry reg(2);
    E e = E::scalar(reg, Rational(1));
    std::vector<Generator> incomplete{reg.xi(0), reg.eta(0)};
    REQUIRE_THROWS_AS(berezin_integrate(e, std::span<const Generator>(incomplete)), std::invalid_argument);
    std::vector<Generator> duplicated{reg.xi(0), reg.eta(0), reg.xi(0), reg.eta(1)};
    REQUIRE_THROWS_AS(berezin_integrate(e, std::span<const Generator>(duplicated)), std::invalid_argument);
}

TEST_CASE("berezin integral is ring-linear and vanishes on missing generators") {
    RngStream rng(23, "berezin-linear");
    for (int it = 0; it < 200; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        GeneratorRegistry reg(n);
        E a = random_element(reg, rng);
        E b = random_element(reg, rng);
        Rational s = random_small_rational(rng);
        REQUIRE(berezin_integrate(a + b) == berezin_integrate(a) + berezin_integrate(b));
        REQUIRE(berezin_integrate(s * a) == s * berezin_integrate(a));
        // Kill one generator from every term: integral must vanish.
        const int g = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()));
        E missing(reg);
        for (const auto& [mask, c] : a.terms())
            if (!(mask & (std::uint64_t{1} << g))) missing += E::monomial(reg, mask, c);
        REQUIRE(berezin_integrate(missing) == Rational(0));
    }
}

TEST_CASE("exponential: base cases and preconditions") {
    GeneratorRegistry reg(1);
    REQUIRE(ext_exp(E(reg)) == E::scalar(reg, Rational(1)));

    E pair = E::monomial(reg, 0b11, Rational(1));
    REQUIRE(ext_exp(pair) == E::scalar(reg, Rational(1)) + pair);

    REQUIRE_THROWS_AS(ext_exp(E::generator(reg, reg.xi(0))), std::invalid_argument);
    REQUIRE_THROWS_AS(ext_exp(E::scalar(reg, Rational(1))), std::invalid_argument);
}

TEST_CASE("exponential of the diagonal action expands over subsets") {
    const int n = 3;
    GeneratorRegistry reg(n);
    E sum(reg);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t pm = (std::uint64_t{1} << reg.xi(i).index) | (std::uint64_t{1} << reg.eta(i).index);
        sum += E::monomial(reg, pm, Rational(-1));
    }
    E expanded = ext_exp(sum);
    // Every subset of pairs appears exactly once, with coefficient the product
    // of its (-xi_l eta_l) factors.
    REQUIRE(expanded.terms().size() == (std::size_t{1} << n));
    for (std::uint32_t j = 0; j < (1u << n); ++j) {
        E expect = E::scalar(reg, Rational(1));
        for (int i = 0; i < n; ++i)
            if (j & (1u << i)) {
                const std::uint64_t pm =
                    (std::uint64_t{1} << reg.xi(i).index) | (std::uint64_t{1} << reg.eta(i).index);
                expect = ext_mul(expect, E::monomial(reg, pm, Rational(-1)));
            }
        for (const auto& [mask, c] : expect.terms()) REQUIRE(expanded.coefficient(mask) == c);
    }
}

TEST_CASE("anticommutativity randomized across registries") {
    RngStream rng(29, "anticommute");
    for (int it = 0; it < 500; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 6);
        GeneratorRegistry reg(n);
        Generator g{static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()))};
        Generator h{static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()))};
        E eg = E::generator(reg, g), eh = E::generator(reg, h);
        if (g.index == h.index)
            REQUIRE(ext_mul(eg, eh).is_zero());
        else
            REQUIRE(ext_mul(eg, eh) == -ext_mul(eh, eg));
    }
}

TEST_CASE("product is associative and bilinear on random elements") {
    RngStream rng(31, "assoc");
    for (int it = 0; it < 1000; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        GeneratorRegistry reg(n);
        E a = random_element(reg, rng), b = random_element(reg, rng), c = random_element(reg, rng);
        REQUIRE(ext_mul(ext_mul(a, b), c) == ext_mul(a, ext_mul(b, c)));
        REQUIRE(ext_mul(a + b, c) == ext_mul(a, c) + ext_mul(b, c));
        REQUIRE(ext_mul(a, b + c) == ext_mul(a, b) + ext_mul(a, c));
        Rational s = random_small_rational(rng);
        REQUIRE(ext_mul(s * a, b) == s * ext_mul(a, b));
    }
}

TEST_CASE("graded Leibniz rule for the left derivative") {
    RngStream rng(37, "leibniz-sign");
    for (int it = 0; it < 400; ++it) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        GeneratorRegistry reg(n);
        // Homogeneous a of a random degree.
        const int deg = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators() + 1));
        E a(reg);
        for (int t = 0; t < 3; ++t) {
            std::uint64_t mask = 0;
            int placed = 0;
            for (int g = 0; g < reg.generators() && placed < deg; ++g) {
                const int remaining = reg.generators() - g;
                if (static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(remaining)) < deg - placed) {
                    mask |= std::uint64_t{1} << g;
                    ++placed;
                }
            }
            if (placed == deg) a += E::monomial(reg, mask, random_small_rational(rng));
        }
        E b = random_element(reg, rng);
        Generator g{static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(reg.generators()))};
        E lhs = fermi_derive(ext_mul(a, b), g);
        E rhs = ext_mul(fermi_derive(a, g), b);
        if (deg % 2 == 0)
            rhs += ext_mul(a, fermi_derive(b, g));
        else
            rhs -= ext_mul(a, fermi_derive(b, g));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("fermionic Gaussian integral: examples and the determinant oracle") {
    Matrix<Rational> id2 = Matrix<Rational>::identity(2);
    REQUIRE(gaussian_fermionic_integral(id2) == Rational(1));

    Matrix<Rational> s(2, 2);
    s(0, 0) = Rational(2);
    s(0, 1) = Rational(1);
    s(1, 0) = Rational(1);
    s(1, 1) = Rational(2);
    REQUIRE(gaussian_fermionic_integral(s) == Rational(3));

    RngStream rng(41, "gauss-det");
    for (int it = 0; it < 60; ++it) {
        const int n = 1 + (it % 6);
        Matrix<Rational> sigma = random_rational_matrix(n, rng);
        Rational engine = gaussian_fermionic_integral(sigma);
        REQUIRE(engine == det_bareiss(sigma));
        if (n <= 5) REQUIRE(engine == oracles::det_permutation(sigma));
    }
}

TEST_CASE("fermionic Gaussian integral over a polynomial ring matches coefficients") {
    // Sigma with entries affine in a symbol t: the engine result and the
    // division-free cofactor determinant must agree as polynomials.
    SymbolTable table;
    const int t = table.add("t");
    RngStream rng(43, "gauss-poly");
    for (int it = 0; it < 10; ++it) {
        const int n = 2 + (it % 2);
        Matrix<RationalPolynomial> sigma(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                RationalPolynomial entry(random_small_rational(rng));
                if (i != j)
                    entry += RationalPolynomial(random_small_rational(rng)) * RationalPolynomial::symbol(t);
                sigma(i, j) = entry;
            }
        REQUIRE(gaussian_fermionic_integral(sigma) == det_cofactor(sigma));
    }
}

TEST_CASE("size mismatch in the bilinear action is rejected") {
    GeneratorRegistry reg(2);
    Matrix<Rational> wrong(3, 3);
    REQUIRE_THROWS_AS(bilinear_action(reg, wrong), std::invalid_argument);
}
