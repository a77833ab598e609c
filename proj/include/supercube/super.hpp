#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "supercube/grassmann.hpp"
#include "supercube/polynomial.hpp"
#include "supercube/quadrature.hpp"
#include "supercube/ring.hpp"

namespace supercube {

/// Scalar test function with a closed-form first derivative. The exponential
/// family decays; polynomials do not (they exist for the Taylor-expansion
/// checks only).
class TestFunction {
  public:
    enum class Family { Exponential, Polynomial, Bump };

    static TestFunction exponential(double lambda) {
        TestFunction f;
        f.family_ = Family::Exponential;
        f.params_ = {lambda};
        return f;
    }
    /// c0 + c1 s + c2 s^2 + ...
    static TestFunction polynomial(std::vector<double> coeffs) {
        TestFunction f;
        f.family_ = Family::Polynomial;
        f.params_ = std::move(coeffs);
        return f;
    }
    /// (1 - s/width)^3 on [0, width], zero beyond; C^2 at the edge.
    static TestFunction bump(double width) {
        TestFunction f;
        f.family_ = Family::Bump;
        f.params_ = {width};
        return f;
    }

    Family family() const { return family_; }

    double value(double s) const {
        switch (family_) {
            case Family::Exponential:
                return std::exp(-params_[0] * s);
            case Family::Polynomial: {
                double acc = 0.0;
                for (size_t k = params_.size(); k-- > 0;) acc = acc * s + params_[k];
                return acc;
            }
            case Family::Bump: {
                const double t = s / params_[0];
                return t >= 1.0 ? 0.0 : std::pow(1.0 - t, 3);
            }
        }
        return 0.0;
    }

    double derivative(double s) const {
        switch (family_) {
            case Family::Exponential:
                return -params_[0] * std::exp(-params_[0] * s);
            case Family::Polynomial: {
                double acc = 0.0;
                for (size_t k = params_.size(); k-- > 1;) acc = acc * s + params_[k] * static_cast<double>(k);
                return acc;
            }
            case Family::Bump: {
                const double t = s / params_[0];
                return t >= 1.0 ? 0.0 : -3.0 * std::pow(1.0 - t, 2) / params_[0];
            }
        }
        return 0.0;
    }

    /// Fast enough decay for the radial quadratures used on [0, inf).
    bool decays() const {
        switch (family_) {
            case Family::Exponential:
                return params_[0] > 0.0;
            case Family::Polynomial:
                return false;
            case Family::Bump:
                return true;
        }
        return false;
    }

    double param(size_t i = 0) const { return params_.at(i); }

  private:
    Family family_ = Family::Exponential;
    std::vector<double> params_;
};

/// F(x + c * xi_i eta_i) = F(x) + F'(x) c xi_i eta_i. Exact: the soul squares
/// to zero, so the two-term expansion is the whole series.
inline GrassmannElement<double> soul_taylor(const TestFunction& f, double x, double soul_coeff,
                                            const GeneratorRegistry& reg, int pair_index) {
    const std::uint64_t pair_mask = (std::uint64_t{1} << reg.xi(pair_index).index) |
                                    (std::uint64_t{1} << reg.eta(pair_index).index);
    GrassmannElement<double> e = GrassmannElement<double>::scalar(reg, f.value(x));
    e += GrassmannElement<double>::monomial(reg, pair_mask, f.derivative(x) * soul_coeff);
    return e;
}

/// Symbolic delta marker produced by the Heaviside rule; consumed downstream
/// (slice estimation), never evaluated here.
struct DeltaMarker {
    double location = 0.0;  // argument the delta sits at
    double coeff = 0.0;     // soul coefficient multiplying it
};

struct HeavisideExpansion {
    double theta = 0.0;  // Theta(a)
    DeltaMarker delta;   // coeff * delta(a), kept formal
};

/// Theta(a + b xi eta) = Theta(a) + b xi eta delta(a). Exactly at a = 0 the
/// boundary is degenerate and we refuse to pick a convention.
inline HeavisideExpansion heaviside_expand(double a, double b) {
    if (a == 0.0)
        throw std::domain_error("heaviside_expand: argument exactly on the boundary (a = 0)");
    return {a > 0.0 ? 1.0 : 0.0, DeltaMarker{a, b}};
}

/// One term of the super-hypercube indicator expansion: for the index set J,
/// the fermionic monomial prod_{j in J} (-2 xi_j eta_j) paired with the formal
/// measure prod_{j in J} delta(1 - B_j^2) * prod_{i not in J} 1{B_i^2 <= 1}.
struct BoundaryTerm {
    std::uint32_t subset = 0;                  // J as a bitmask over pairs
    GrassmannElement<Rational> fermion_monomial;
    std::uint32_t delta_set = 0;               // pairs carrying delta(1 - B^2)
    std::uint32_t indicator_set = 0;           // pairs carrying 1{B^2 <= 1}

    BoundaryTerm(std::uint32_t j, GrassmannElement<Rational> mono, int n)
        : subset(j),
          fermion_monomial(std::move(mono)),
          delta_set(j),
          indicator_set(~j & ((std::uint32_t{1} << n) - 1)) {}
};

/// All 2^n terms of prod_i [1{B_i^2 <= 1} - 2 xi_i eta_i delta(1 - B_i^2)],
/// indexed by the subset J collecting the delta factors.
inline std::vector<BoundaryTerm> indicator_expand(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("indicator_expand: n must be in [1, 20]");
    GeneratorRegistry reg(n);
    std::vector<BoundaryTerm> terms;
    terms.reserve(std::size_t{1} << n);
    for (std::uint32_t j = 0; j < (std::uint32_t{1} << n); ++j) {
        GrassmannElement<Rational> mono = GrassmannElement<Rational>::scalar(reg, Rational(1));
        for (int i = 0; i < n; ++i) {
            if (!(j & (std::uint32_t{1} << i))) continue;
            const std::uint64_t pair_mask =
                (std::uint64_t{1} << reg.xi(i).index) | (std::uint64_t{1} << reg.eta(i).index);
            mono = ext_mul(mono, GrassmannElement<Rational>::monomial(reg, pair_mask, Rational(-2)));
        }
        terms.emplace_back(j, std::move(mono), n);
    }
    return terms;
}

/// The supersymmetry derivation Q = sum_i [xi_i d/dY_i + eta_i d/dZ_i
/// + Y_i d/deta_i - Z_i d/dxi_i], acting on Grassmann elements whose
/// coefficients are polynomials in the commuting symbols Y_i, Z_i.
class SuperDerivation {
  public:
    explicit SuperDerivation(int pairs) : reg_(pairs) {
        for (int i = 1; i <= pairs; ++i) y_ids_.push_back(table_.add("Y" + std::to_string(i)));
        for (int i = 1; i <= pairs; ++i) z_ids_.push_back(table_.add("Z" + std::to_string(i)));
    }

    const GeneratorRegistry& registry() const { return reg_; }
    const SymbolTable& symbols() const { return table_; }
    int y_symbol(int i) const { return y_ids_.at(static_cast<size_t>(i)); }
    int z_symbol(int i) const { return z_ids_.at(static_cast<size_t>(i)); }

    using Element = GrassmannElement<RationalPolynomial>;

    Element zero() const { return Element(reg_); }
    Element scalar(RationalPolynomial p) const { return Element::scalar(reg_, std::move(p)); }

    Element apply(const Element& e) const {
        if (!(e.registry() == reg_)) throw std::invalid_argument("SuperDerivation: registry mismatch");
        Element out(reg_);
        for (int i = 0; i < reg_.pairs(); ++i) {
            // Bosonic piece: differentiate the coefficient polynomials, then
            // left-multiply by the matching fermionic generator.
            out += ext_mul(Element::generator(reg_, reg_.xi(i)), coefficient_derivative(e, y_symbol(i)));
            out += ext_mul(Element::generator(reg_, reg_.eta(i)), coefficient_derivative(e, z_symbol(i)));
            // Fermionic piece: left derivatives, coefficients multiplied by the
            // dual bosonic symbol.
            out += RationalPolynomial::symbol(y_symbol(i)) * fermi_derive(e, reg_.eta(i));
            out -= RationalPolynomial::symbol(z_symbol(i)) * fermi_derive(e, reg_.xi(i));
        }
        return out;
    }

    /// Y_i^2 + Z_i^2 + 2 xi_i eta_i, the Q_i-closed combination.
    Element closed_pair(int i) const {
        RationalPolynomial body = RationalPolynomial::symbol(y_symbol(i), 2) +
                                  RationalPolynomial::symbol(z_symbol(i), 2);
        Element e = scalar(body);
        const std::uint64_t pair_mask = (std::uint64_t{1} << reg_.xi(i).index) |
                                        (std::uint64_t{1} << reg_.eta(i).index);
        e += Element::monomial(reg_, pair_mask, RationalPolynomial(2));
        return e;
    }

    /// Y^t Sigma eta for a square rational matrix over the registry pairs.
    Element y_bilinear_eta(const Matrix<Rational>& sigma) const {
        if (sigma.rows() != reg_.pairs() || sigma.cols() != reg_.pairs())
            throw std::invalid_argument("SuperDerivation: matrix size must match pairs");
        Element e(reg_);
        for (int i = 0; i < reg_.pairs(); ++i)
            for (int j = 0; j < reg_.pairs(); ++j) {
                if (is_ring_zero(sigma(i, j))) continue;
                RationalPolynomial coeff =
                    RationalPolynomial(sigma(i, j)) * RationalPolynomial::symbol(y_symbol(i));
                e += Element::monomial(reg_, std::uint64_t{1} << reg_.eta(j).index, coeff);
            }
        return e;
    }

    /// xi^t Sigma eta + Y^t Sigma Y, the expected image of y_bilinear_eta.
    Element ward_seed_rhs(const Matrix<Rational>& sigma) const {
        Element e(reg_);
        for (int i = 0; i < reg_.pairs(); ++i)
            for (int j = 0; j < reg_.pairs(); ++j) {
                if (is_ring_zero(sigma(i, j))) continue;
                const std::uint64_t mask = (std::uint64_t{1} << reg_.xi(i).index) |
                                           (std::uint64_t{1} << reg_.eta(j).index);
                e += Element::monomial(reg_, mask, RationalPolynomial(sigma(i, j)));
                RationalPolynomial yy = RationalPolynomial(sigma(i, j)) *
                                        RationalPolynomial::symbol(y_symbol(i)) *
                                        RationalPolynomial::symbol(y_symbol(j));
                e += scalar(yy);
            }
        return e;
    }

  private:
    Element coefficient_derivative(const Element& e, int sym) const {
        Element out(reg_);
        for (const auto& [mask, poly] : e.terms()) {
            RationalPolynomial d = poly.derivative(sym);
            if (!d.is_zero()) out += Element::monomial(reg_, mask, std::move(d));
        }
        return out;
    }

    GeneratorRegistry reg_;
    SymbolTable table_;
    std::vector<int> y_ids_;
    std::vector<int> z_ids_;
};

struct CheckResult {
    bool pass = false;
    double lhs = 0.0;       // computed value
    double rhs = 0.0;       // reference value
    double residual = 0.0;  // |lhs - rhs|
};

/// Localization at desk scale (one pair): integrate F(Y^2 + Z^2 + 2 xi eta)
/// over the flat superspace measure. The engine does the Berezin step per
/// radial node; the result must collapse to F(0). The variance hint only sets
/// the radial truncation scale.
inline CheckResult localization_check(const TestFunction& f, double variance_hint = 1.0,
                                      double tol = 1e-9) {
    if (variance_hint <= 0.0) throw std::invalid_argument("localization_check: variance must be positive");
    if (!f.decays())
        throw std::invalid_argument("localization_check: test function must decay at infinity");
    GeneratorRegistry reg(1);
    auto radial = [&](double r) {
        // Berezin part of F(r^2 + 2 xi eta), times the polar weight r.
        GrassmannElement<double> el = soul_taylor(f, r * r, 2.0, reg, 0);
        return berezin_integrate(el) * r;
    };
    // Generous truncation: the integrand decays at least like exp(-r^2 scale)
    // or has compact support.
    const double rmax = f.family() == TestFunction::Family::Bump
                            ? std::sqrt(f.param(0))
                            : std::sqrt(60.0 * std::max(variance_hint, 1.0) / std::max(f.param(0), 0.5));
    QuadratureResult q = integrate_refining(radial, 0.0, rmax, tol * 0.1, 12);
    if (!q.converged) throw std::runtime_error("localization_check: radial quadrature did not converge");
    CheckResult r;
    r.lhs = q.value;
    r.rhs = f.value(0.0);
    r.residual = std::fabs(r.lhs - r.rhs);
    r.pass = r.residual <= tol;
    return r;
}

struct ReductionResult {
    bool pass = false;
    double lhs = 0.0;       // one-dimensional Gaussian expectation of F(X^2)
    double rhs = 0.0;       // superspace integral after the Berezin step
    double analytic = 0.0;  // (1 + 2 lambda c)^{-1/2}
    double residual = 0.0;  // max deviation from the analytic value
};

/// Dimensional reduction at desk scale: E[F(X^2)] for X ~ N(0, c) must equal
/// the normalized superintegral of F over three bosons and one fermion pair.
/// Exponential family only — that is where the closed form exists.
inline ReductionResult reduction_check(const TestFunction& f, double c, double tol = 1e-9) {
    if (c <= 0.0) throw std::invalid_argument("reduction_check: variance must be positive");
    if (f.family() != TestFunction::Family::Exponential)
        throw std::invalid_argument("reduction_check: exponential family only");
    const double lambda = f.param(0);
    if (lambda < 0.0) throw std::invalid_argument("reduction_check: lambda must be nonnegative");

    const double analytic = 1.0 / std::sqrt(1.0 + 2.0 * lambda * c);

    // LHS: (2 pi c)^{-1/2} integral of exp(-x^2/(2c)) F(x^2).
    const double xmax = std::sqrt(2.0 * c / (1.0 + 2.0 * lambda * c)) * 10.0;
    auto lhs_integrand = [&](double x) {
        return std::exp(-0.5 * x * x / c) * f.value(x * x);
    };
    QuadratureResult lq = integrate_refining(lhs_integrand, 0.0, xmax, tol * 0.05, 12);
    const double lhs = 2.0 * lq.value / std::sqrt(2.0 * std::numbers::pi * c);

    // RHS: radial superintegral. Per node the engine multiplies the fermionic
    // Gaussian weight exp(-xi eta / c) into the soul expansion of F at
    // B^2 = r^2 and performs the Berezin integral; the bosonic factor
    // exp(-r^2/(2c)) and the R^3 polar weight 4 pi r^2 stay numeric. The whole
    // thing is normalized by the partition function c^{1/2}.
    GeneratorRegistry reg(1);
    GrassmannElement<double> fermi_weight =
        ext_exp(GrassmannElement<double>::monomial(reg, 0b11, -1.0 / c));
    auto rhs_integrand = [&](double r) {
        GrassmannElement<double> el = ext_mul(fermi_weight, soul_taylor(f, r * r, 2.0, reg, 0));
        const double berezin = berezin_integrate(el);
        return berezin * std::exp(-0.5 * r * r / c) * r * r;
    };
    const double rmax = std::sqrt(2.0 * c / (1.0 + 2.0 * lambda * c)) * 11.0;
    QuadratureResult rq = integrate_refining(rhs_integrand, 0.0, rmax, tol * 0.05, 12);
    const double rhs = 4.0 * std::numbers::pi * rq.value /
                       std::pow(2.0 * std::numbers::pi, 1.5) / std::sqrt(c);

    ReductionResult out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.analytic = analytic;
    out.residual = std::max(std::fabs(lhs - analytic), std::fabs(rhs - analytic));
    out.pass = out.residual <= tol && !(lq.converged == false) && !(rq.converged == false);
    return out;
}

}  // namespace supercube
