#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "supercube/ring.hpp"

namespace supercube {

/// Names the commuting symbols a polynomial ring is built over. Symbol ids are
/// stable for the table's lifetime; polynomials store ids only.
class SymbolTable {
  public:
    int add(std::string name) {
        for (int i = 0; i < static_cast<int>(names_.size()); ++i)
            if (names_[i] == name) return i;
        names_.push_back(std::move(name));
        return static_cast<int>(names_.size()) - 1;
    }

    int id(std::string_view name) const {
        for (int i = 0; i < static_cast<int>(names_.size()); ++i)
            if (names_[i] == name) return i;
        throw std::invalid_argument("SymbolTable: unknown symbol " + std::string(name));
    }

    const std::string& name(int id) const { return names_.at(static_cast<size_t>(id)); }
    int size() const { return static_cast<int>(names_.size()); }

  private:
    std::vector<std::string> names_;
};

/// Sparse multivariate polynomial over a commutative coefficient ring.
/// Monomials are sorted (symbol id, exponent) lists; zero coefficients are
/// never stored. Degrees stay tiny here (quadratic actions), so a plain
/// ordered map is the right container.
template <CoefficientRing C>
class Polynomial {
  public:
    // (symbol id, exponent > 0), strictly increasing in id
    using Monomial = std::vector<std::pair<int, int>>;

    Polynomial() = default;
    explicit Polynomial(int k) {
        if (k != 0) terms_[Monomial{}] = C(k);
    }
    explicit Polynomial(C c) {
        if (!is_ring_zero(c)) terms_[Monomial{}] = std::move(c);
    }

    static Polynomial symbol(int id, int exponent = 1) {
        if (exponent < 0) throw std::invalid_argument("Polynomial: negative exponent");
        Polynomial p;
        if (exponent == 0)
            p.terms_[Monomial{}] = C(1);
        else
            p.terms_[Monomial{{id, exponent}}] = C(1);
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }

    C constant_term() const {
        auto it = terms_.find(Monomial{});
        return it == terms_.end() ? C(0) : it->second;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [mono, c] : terms_) {
            int d = 0;
            for (const auto& [sym, e] : mono) d += e;
            deg = std::max(deg, d);
        }
        return deg;
    }

    const std::map<Monomial, C>& terms() const { return terms_; }

    Polynomial operator-() const {
        Polynomial r;
        for (const auto& [mono, c] : terms_) r.terms_[mono] = -c;
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [mono, c] : o.terms_) add_term(mono, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                C prod = ca * cb;
                r.add_term(merge(ma, mb), prod);
            }
        return r;
    }

    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial operator/(int k) const {
        if (k == 0) throw std::invalid_argument("Polynomial: division by zero");
        Polynomial r;
        for (const auto& [mono, c] : terms_) r.terms_[mono] = c / k;
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.terms_ == b.terms_;
    }

    /// Formal partial derivative with respect to one symbol.
    Polynomial derivative(int sym) const {
        Polynomial r;
        for (const auto& [mono, c] : terms_) {
            for (size_t i = 0; i < mono.size(); ++i) {
                if (mono[i].first != sym) continue;
                Monomial m = mono;
                C coeff = c * C(mono[i].second);
                if (m[i].second == 1)
                    m.erase(m.begin() + static_cast<long>(i));
                else
                    m[i].second -= 1;
                r.add_term(m, coeff);
                break;
            }
        }
        return r;
    }

    /// Substitute a value for every symbol; `values[id]` must cover all ids used.
    template <class V>
    V evaluate(const std::vector<V>& values) const {
        V acc(0);
        for (const auto& [mono, c] : terms_) {
            V term = ring_cast<V>(c);
            for (const auto& [sym, e] : mono) {
                const V& v = values.at(static_cast<size_t>(sym));
                for (int i = 0; i < e; ++i) term = term * v;
            }
            acc = acc + term;
        }
        return acc;
    }

    std::string to_string(const SymbolTable& table) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [mono, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            out += ring_to_string(c);
            for (const auto& [sym, e] : mono) {
                out += "*" + table.name(sym);
                if (e > 1) out += "^" + std::to_string(e);
            }
        }
        return out;
    }

  private:
    template <class V>
    static V ring_cast(const C& c) {
        if constexpr (std::is_same_v<V, double> && std::is_same_v<C, Rational>)
            return to_double(c);
        else
            return V(c);
    }

    static Monomial merge(const Monomial& a, const Monomial& b) {
        Monomial m;
        m.reserve(a.size() + b.size());
        size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first < b[j].first)
                m.push_back(a[i++]);
            else if (a[i].first > b[j].first)
                m.push_back(b[j++]);
            else {
                m.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i, ++j;
            }
        }
        while (i < a.size()) m.push_back(a[i++]);
        while (j < b.size()) m.push_back(b[j++]);
        return m;
    }

    void add_term(const Monomial& mono, const C& c) {
        if (is_ring_zero(c)) return;
        auto it = terms_.find(mono);
        if (it == terms_.end()) {
            terms_.emplace(mono, c);
        } else {
            it->second = it->second + c;
            if (is_ring_zero(it->second)) terms_.erase(it);
        }
    }

    std::map<Monomial, C> terms_;
};

using RationalPolynomial = Polynomial<Rational>;

}  // namespace supercube
