#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supercube/matrix.hpp"
#include "supercube/ring.hpp"

namespace supercube {

/// One anticommuting generator, identified by its index in a registry.
struct Generator {
    int index = -1;
    friend bool operator==(Generator, Generator) = default;
};

/// Fixes the generator set: pairs (xi_1..xi_n, eta_1..eta_n) mapped to the
/// stable indices 0..2n-1 (all xi first, then all eta). Elements over
/// different registry sizes never mix.
class GeneratorRegistry {
  public:
    explicit GeneratorRegistry(int pairs) : pairs_(pairs) {
        if (pairs < 1 || pairs > 32)
            throw std::invalid_argument("GeneratorRegistry: pair count must be in [1, 32]");
    }

    int pairs() const { return pairs_; }
    int generators() const { return 2 * pairs_; }

    Generator xi(int i) const { return {check_pair(i)}; }
    Generator eta(int i) const { return {check_pair(i) + pairs_}; }

    bool is_xi(Generator g) const { return g.index >= 0 && g.index < pairs_; }
    /// Pair index of either member.
    int pair_of(Generator g) const { return is_xi(g) ? g.index : g.index - pairs_; }

    std::uint64_t full_mask() const {
        return generators() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << generators()) - 1;
    }

    std::string name(Generator g) const {
        const int p = pair_of(g) + 1;
        return (is_xi(g) ? "xi" : "eta") + std::to_string(p);
    }

    friend bool operator==(const GeneratorRegistry&, const GeneratorRegistry&) = default;

  private:
    int check_pair(int i) const {
        if (i < 0 || i >= pairs_) throw std::invalid_argument("GeneratorRegistry: pair index out of range");
        return i;
    }
    int pairs_;
};

namespace detail {

/// Parity of the number of transpositions needed to interleave the ascending
/// monomials `a` and `b` (disjoint bitmasks) into one ascending monomial:
/// counts pairs (x in a, y in b) with x > y.
inline int merge_sign(std::uint64_t a, std::uint64_t b) {
    int swaps = 0;
    std::uint64_t rest = b;
    while (rest) {
        const int pos = std::countr_zero(rest);
        rest &= rest - 1;
        swaps += std::popcount(a >> (pos + 1));
    }
    return (swaps & 1) ? -1 : 1;
}

}  // namespace detail

/// Element of the exterior (Grassmann) algebra over a registry's generators,
/// with coefficients in a commutative ring. Terms are keyed by generator
/// bitmask; a stored coefficient always refers to the monomial with its
/// generators in ascending index order, and zero coefficients are dropped, so
/// equality is plain map equality.
template <CoefficientRing R>
class GrassmannElement {
  public:
    explicit GrassmannElement(GeneratorRegistry reg) : reg_(reg) {}

    static GrassmannElement scalar(GeneratorRegistry reg, R value) {
        GrassmannElement e(reg);
        e.add_term(0, value);
        return e;
    }

    static GrassmannElement generator(GeneratorRegistry reg, Generator g) {
        return monomial(reg, std::uint64_t{1} << check_generator(reg, g).index, R(1));
    }

    /// Monomial with generators in ascending order and the given coefficient.
    static GrassmannElement monomial(GeneratorRegistry reg, std::uint64_t mask, R coeff) {
        if (mask & ~reg.full_mask())
            throw std::invalid_argument("GrassmannElement: monomial mask out of range");
        GrassmannElement e(reg);
        e.add_term(mask, std::move(coeff));
        return e;
    }

    const GeneratorRegistry& registry() const { return reg_; }
    const std::map<std::uint64_t, R>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    R coefficient(std::uint64_t mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? R(0) : it->second;
    }
    R scalar_part() const { return coefficient(0); }

    bool is_homogeneous(int degree) const {
        for (const auto& [mask, c] : terms_)
            if (std::popcount(mask) != degree) return false;
        return true;
    }
    bool is_even() const {
        for (const auto& [mask, c] : terms_)
            if (std::popcount(mask) % 2 != 0) return false;
        return true;
    }
    int max_degree() const {
        int d = 0;
        for (const auto& [mask, c] : terms_) d = std::max(d, std::popcount(mask));
        return d;
    }

    GrassmannElement operator-() const {
        GrassmannElement e(reg_);
        for (const auto& [mask, c] : terms_) e.terms_.emplace(mask, -c);
        return e;
    }

    GrassmannElement& operator+=(const GrassmannElement& o) {
        check_registry(o);
        for (const auto& [mask, c] : o.terms_) add_term(mask, c);
        return *this;
    }
    GrassmannElement& operator-=(const GrassmannElement& o) {
        check_registry(o);
        for (const auto& [mask, c] : o.terms_) add_term(mask, -c);
        return *this;
    }

    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }

    friend GrassmannElement operator*(const R& s, const GrassmannElement& a) {
        GrassmannElement e(a.reg_);
        for (const auto& [mask, c] : a.terms_) e.add_term(mask, s * c);
        return e;
    }

    friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
        return a.reg_ == b.reg_ && a.terms_ == b.terms_;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [mask, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += "(" + ring_to_string(c) + ")";
            std::uint64_t rest = mask;
            while (rest) {
                const int pos = std::countr_zero(rest);
                rest &= rest - 1;
                out += "*" + reg_.name(Generator{pos});
            }
        }
        return out;
    }

    template <CoefficientRing S>
    friend GrassmannElement<S> ext_mul(const GrassmannElement<S>&, const GrassmannElement<S>&);
    template <CoefficientRing S>
    friend GrassmannElement<S> fermi_derive(const GrassmannElement<S>&, Generator);

  private:
    static Generator check_generator(const GeneratorRegistry& reg, Generator g) {
        if (g.index < 0 || g.index >= reg.generators())
            throw std::invalid_argument("GrassmannElement: generator outside registry");
        return g;
    }

    void check_registry(const GrassmannElement& o) const {
        if (!(reg_ == o.reg_))
            throw std::invalid_argument("GrassmannElement: registry mismatch");
    }

    void add_term(std::uint64_t mask, R c) {
        if (is_ring_zero(c)) return;
        auto it = terms_.find(mask);
        if (it == terms_.end()) {
            terms_.emplace(mask, std::move(c));
        } else {
            it->second = it->second + c;
            if (is_ring_zero(it->second)) terms_.erase(it);
        }
    }

    GeneratorRegistry reg_;
    std::map<std::uint64_t, R> terms_;
};

/// Associative, ring-bilinear exterior product. Overlapping generators kill a
/// term (nilpotency); the sign is the transposition parity of merging the two
/// ascending monomials.
template <CoefficientRing R>
GrassmannElement<R> ext_mul(const GrassmannElement<R>& a, const GrassmannElement<R>& b) {
    a.check_registry(b);
    GrassmannElement<R> out(a.registry());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            if (ma & mb) continue;
            R prod = ca * cb;
            if (detail::merge_sign(ma, mb) < 0) prod = -prod;
            out.add_term(ma | mb, std::move(prod));
        }
    }
    return out;
}

/// Left fermionic derivative: anticommute `g` to the front of each containing
/// monomial (one sign per generator passed), then delete it.
template <CoefficientRing R>
GrassmannElement<R> fermi_derive(const GrassmannElement<R>& a, Generator g) {
    if (g.index < 0 || g.index >= a.registry().generators())
        throw std::invalid_argument("fermi_derive: generator outside registry");
    const std::uint64_t bit = std::uint64_t{1} << g.index;
    GrassmannElement<R> out(a.registry());
    for (const auto& [mask, c] : a.terms()) {
        if (!(mask & bit)) continue;
        const int below = std::popcount(mask & (bit - 1));
        out.add_term(mask & ~bit, (below & 1) ? -c : c);
    }
    return out;
}

/// Berezin integral against the full measure written as the operator string
/// d_{order[0]} d_{order[1]} ... — the rightmost derivative acts first, as in
/// iterated operator notation. `order` must list every generator exactly once.
/// The result is the coefficient of the empty monomial once all generators are
/// integrated out, i.e. the top-monomial coefficient up to the order's sign.
template <CoefficientRing R>
R berezin_integrate(const GrassmannElement<R>& a, std::span<const Generator> order) {
    const GeneratorRegistry& reg = a.registry();
    if (static_cast<int>(order.size()) != reg.generators())
        throw std::invalid_argument("berezin_integrate: order must list every generator once");
    std::uint64_t seen = 0;
    for (Generator g : order) {
        if (g.index < 0 || g.index >= reg.generators())
            throw std::invalid_argument("berezin_integrate: generator outside registry");
        const std::uint64_t bit = std::uint64_t{1} << g.index;
        if (seen & bit) throw std::invalid_argument("berezin_integrate: duplicated generator in order");
        seen |= bit;
    }
    GrassmannElement<R> cur = a;
    for (auto it = order.rbegin(); it != order.rend(); ++it) cur = fermi_derive(cur, *it);
    return cur.scalar_part();
}

/// The measure sequence used throughout: d_xi1 d_eta1 d_xi2 d_eta2 ...
inline std::vector<Generator> pairwise_order(const GeneratorRegistry& reg) {
    std::vector<Generator> order;
    order.reserve(static_cast<size_t>(reg.generators()));
    for (int i = 0; i < reg.pairs(); ++i) {
        order.push_back(reg.xi(i));
        order.push_back(reg.eta(i));
    }
    return order;
}

template <CoefficientRing R>
R berezin_integrate(const GrassmannElement<R>& a) {
    std::vector<Generator> order = pairwise_order(a.registry());
    return berezin_integrate(a, std::span<const Generator>(order));
}

/// Exponential of an even element with zero scalar part. The series truncates
/// by nilpotency after at most `pairs` powers.
template <CoefficientRing R>
GrassmannElement<R> ext_exp(const GrassmannElement<R>& e) {
    if (!e.is_even())
        throw std::invalid_argument("ext_exp: element must be even");
    if (!is_ring_zero(e.scalar_part()))
        throw std::invalid_argument("ext_exp: scalar part must be zero (factor it out)");
    GrassmannElement<R> acc = GrassmannElement<R>::scalar(e.registry(), R(1));
    GrassmannElement<R> power = GrassmannElement<R>::scalar(e.registry(), R(1));
    for (int k = 1; k <= e.registry().pairs(); ++k) {
        power = ext_mul(power, e);
        if (power.is_zero()) break;
        GrassmannElement<R> scaled(e.registry());
        for (const auto& [mask, c] : power.terms()) scaled += GrassmannElement<R>::monomial(e.registry(), mask, c / k);
        power = scaled;
        acc += power;
    }
    return acc;
}

/// The quadratic fermionic action xi^t Sigma eta as an algebra element.
template <CoefficientRing R>
GrassmannElement<R> bilinear_action(const GeneratorRegistry& reg, const Matrix<R>& sigma) {
    if (!sigma.is_square() || sigma.rows() != reg.pairs())
        throw std::invalid_argument("bilinear_action: matrix size must match registry pairs");
    GrassmannElement<R> s(reg);
    for (int i = 0; i < reg.pairs(); ++i)
        for (int j = 0; j < reg.pairs(); ++j) {
            if (is_ring_zero(sigma(i, j))) continue;
            // xi_i comes before eta_j in index order, so the coefficient is raw.
            s += GrassmannElement<R>::monomial(
                reg, (std::uint64_t{1} << reg.xi(i).index) | (std::uint64_t{1} << reg.eta(j).index),
                sigma(i, j));
        }
    return s;
}

/// Integrates exp(-xi^t Sigma eta) against the pairwise measure; equals
/// det(Sigma). The engine-side route of the determinant identity.
template <CoefficientRing R>
R gaussian_fermionic_integral(const Matrix<R>& sigma) {
    if (!sigma.is_square()) throw std::invalid_argument("gaussian_fermionic_integral: non-square matrix");
    GeneratorRegistry reg(sigma.rows());
    GrassmannElement<R> s = bilinear_action(reg, sigma);
    return berezin_integrate(ext_exp(-s));
}

}  // namespace supercube
