#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supercube/config.hpp"
#include "supercube/matrix.hpp"
#include "supercube/rng.hpp"

namespace supercube {

/// Small random rationals keep exact arithmetic fast: numerators in [-9, 9],
/// denominators in [1, 9].
inline Rational random_small_rational(RngStream& rng) {
    const int num = static_cast<int>(rng.next_u64() % 19) - 9;
    const int den = static_cast<int>(rng.next_u64() % 9) + 1;
    return Rational(num, den);
}

inline Matrix<Rational> random_rational_matrix(int n, RngStream& rng) {
    Matrix<Rational> m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = random_small_rational(rng);
    return m;
}

inline Matrix<Rational> random_symmetric_rational(int n, RngStream& rng) {
    Matrix<Rational> m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Rational v = random_small_rational(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

/// G G^t plus the identity: symmetric and positive definite by construction,
/// still exactly rational.
inline Matrix<Rational> random_rational_pd(int n, RngStream& rng) {
    Matrix<Rational> g = random_rational_matrix(n, rng);
    Matrix<Rational> m = g * g.transposed();
    for (int i = 0; i < n; ++i) m(i, i) = m(i, i) + Rational(1);
    return m;
}

/// Normalized-Gram random correlation matrix: G has iid standard normal
/// entries, C = D^{-1/2} G G^t D^{-1/2}, diagonal pinned to exactly 1.
inline Matrix<double> random_correlation_matrix(int n, RngStream& rng) {
    Matrix<double> g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.next_normal();
    Matrix<double> s = g * g.transposed();
    Matrix<double> c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = s(i, j) / std::sqrt(s(i, i) * s(j, j));
    for (int i = 0; i < n; ++i) c(i, i) = 1.0;
    return c;
}

/// Reproducible ensemble of correlation-matrix specs. A draw that fails the
/// factorization check (numerically razor-thin Gram) is retried on the next
/// derived stream, deterministically.
inline std::vector<MatrixSpec> generate_ensemble(int n, int n1, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("generate_ensemble: count must be >= 1");
    if (n < 2 || n1 < 1 || n1 >= n) throw std::invalid_argument("generate_ensemble: need n >= 2 and 1 <= n1 < n");
    std::vector<MatrixSpec> specs;
    specs.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            RngStream rng(seed, "ensemble", static_cast<std::uint64_t>(i) * 64 + attempt);
            Matrix<double> c = random_correlation_matrix(n, rng);
            if (cholesky(c)) {
                specs.push_back(MatrixSpec{"e" + std::to_string(i), c, n1});
                break;
            }
            if (attempt > 32) throw std::runtime_error("generate_ensemble: cannot draw a PD matrix");
        }
    }
    return specs;
}

}  // namespace supercube
