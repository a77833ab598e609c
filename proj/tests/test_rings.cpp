#include <catch2/catch_amalgamated.hpp>

#include "supercube/polynomial.hpp"
#include "supercube/random_matrices.hpp"
#include "supercube/ring.hpp"
#include "supercube/rng.hpp"

using namespace supercube;

namespace {

RationalPolynomial random_poly(SymbolTable& table, RngStream& rng, int symbols, int max_terms = 4) {
    RationalPolynomial p;
    const int terms = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_terms));
    for (int t = 0; t < terms; ++t) {
        RationalPolynomial mono(random_small_rational(rng));
        for (int s = 0; s < symbols; ++s) {
            const int e = static_cast<int>(rng.next_u64() % 3);
            if (e > 0) mono *= RationalPolynomial::symbol(s, e);
        }
        p += mono;
    }
    return p;
}

}  // namespace

TEST_CASE("rational ring laws hold on random triples") {
    RngStream rng(7, "ring-laws");
    for (int it = 0; it < 1000; ++it) {
        Rational a = random_small_rational(rng);
        Rational b = random_small_rational(rng);
        Rational c = random_small_rational(rng);
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + Rational(0) == a);
        REQUIRE(a * Rational(1) == a);
        REQUIRE(a + (-a) == Rational(0));
    }
}

TEST_CASE("polynomial ring laws hold on random triples") {
    SymbolTable table;
    table.add("t");
    table.add("u");
    table.add("v");
    RngStream rng(11, "poly-laws");
    for (int it = 0; it < 400; ++it) {
        RationalPolynomial a = random_poly(table, rng, 3);
        RationalPolynomial b = random_poly(table, rng, 3);
        RationalPolynomial c = random_poly(table, rng, 3);
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + RationalPolynomial(0) == a);
        REQUIRE(a * RationalPolynomial(1) == a);
        REQUIRE((a - a).is_zero());
    }
}

TEST_CASE("polynomial evaluation is a ring homomorphism") {
    SymbolTable table;
    table.add("t");
    table.add("u");
    RngStream rng(13, "poly-eval");
    for (int it = 0; it < 200; ++it) {
        RationalPolynomial a = random_poly(table, rng, 2);
        RationalPolynomial b = random_poly(table, rng, 2);
        std::vector<Rational> at = {random_small_rational(rng), random_small_rational(rng)};
        REQUIRE((a * b).evaluate(at) == a.evaluate(at) * b.evaluate(at));
        REQUIRE((a + b).evaluate(at) == a.evaluate(at) + b.evaluate(at));
    }
}

TEST_CASE("polynomial derivative: linearity and product rule") {
    SymbolTable table;
    const int t = table.add("t");
    table.add("u");
    RngStream rng(17, "poly-derive");
    for (int it = 0; it < 200; ++it) {
        RationalPolynomial a = random_poly(table, rng, 2);
        RationalPolynomial b = random_poly(table, rng, 2);
        REQUIRE((a + b).derivative(t) == a.derivative(t) + b.derivative(t));
        REQUIRE((a * b).derivative(t) == a.derivative(t) * b + a * b.derivative(t));
    }
    // d/dt t^2 = 2 t
    RationalPolynomial t2 = RationalPolynomial::symbol(t, 2);
    REQUIRE(t2.derivative(t) == RationalPolynomial(2) * RationalPolynomial::symbol(t));
}

TEST_CASE("polynomial derivative matches a finite difference at double values") {
    SymbolTable table;
    const int t = table.add("t");
    RngStream rng(19, "poly-fd");
    for (int it = 0; it < 50; ++it) {
        RationalPolynomial p = random_poly(table, rng, 1);
        const double x = rng.next_uniform() * 2.0 - 1.0;
        auto eval = [&](double v) { return p.evaluate<double>(std::vector<double>{v}); };
        const double fd = (eval(x + 1e-6) - eval(x - 1e-6)) / 2e-6;
        const double exact = p.derivative(t).evaluate<double>(std::vector<double>{x});
        REQUIRE(std::fabs(fd - exact) < 1e-5 * (1.0 + std::fabs(exact)));
    }
}

TEST_CASE("division by machine integers is exact for rationals and polynomials") {
    REQUIRE(Rational(1, 3) / 2 == Rational(1, 6));
    SymbolTable table;
    const int t = table.add("t");
    RationalPolynomial p = RationalPolynomial(3) * RationalPolynomial::symbol(t);
    REQUIRE(p / 3 == RationalPolynomial::symbol(t));
    REQUIRE_THROWS_AS(p / 0, std::invalid_argument);
}

TEST_CASE("symbol table ids are stable and unique") {
    SymbolTable table;
    const int a = table.add("alpha");
    const int b = table.add("beta");
    REQUIRE(a != b);
    REQUIRE(table.add("alpha") == a);
    REQUIRE(table.id("beta") == b);
    REQUIRE_THROWS_AS(table.id("gamma"), std::invalid_argument);
}
