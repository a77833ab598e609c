#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "supercube/grassmann.hpp"
#include "supercube/matrix.hpp"
#include "supercube/ring.hpp"

namespace supercube {

/// Index subset of {1..n} as a bitmask (bit i-1 for variable i), with the
/// block split J = J1 u J2 induced by the first-block size n1.
struct SubsetIndex {
    std::uint32_t mask = 0;

    static std::uint32_t block1(std::uint32_t mask, int n1) {
        return mask & ((std::uint32_t{1} << n1) - 1);
    }
    static std::uint32_t block2(std::uint32_t mask, int n1) {
        return mask & ~((std::uint32_t{1} << n1) - 1);
    }
    int size() const { return std::popcount(mask); }
    bool empty() const { return mask == 0; }
};

/// The block-interpolated covariance family: diagonal blocks fixed, off-blocks
/// scaled by tau in [0,1], so tau=1 is the original matrix and tau=0 makes the
/// two blocks independent.
template <CoefficientRing T>
class CovarianceInterpolation {
  public:
    CovarianceInterpolation(Matrix<T> c, int n1) : c_(std::move(c)), n1_(n1) {
        if (!c_.is_square()) throw std::invalid_argument("CovarianceInterpolation: matrix must be square");
        if constexpr (std::is_same_v<T, double>) {
            if (!c_.is_symmetric(1e-12))
                throw std::invalid_argument("CovarianceInterpolation: matrix must be symmetric (1e-12)");
        } else {
            if (!c_.is_symmetric())
                throw std::invalid_argument("CovarianceInterpolation: matrix must be symmetric");
        }
        if (n1_ < 1 || n1_ >= c_.rows())
            throw std::invalid_argument("CovarianceInterpolation: split must satisfy 1 <= n1 < n");
    }

    const Matrix<T>& matrix() const { return c_; }
    int dim() const { return c_.rows(); }
    int n1() const { return n1_; }
    int n2() const { return c_.rows() - n1_; }

    bool cross_block(int i, int j) const { return (i < n1_) != (j < n1_); }

    Matrix<T> interpolate(const T& tau) const {
        Matrix<T> m = c_;
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                if (cross_block(i, j)) m(i, j) = tau * m(i, j);
        return m;
    }

    /// d/dtau of interpolate(tau): the off-block entries of C, zero elsewhere.
    Matrix<T> tau_pattern() const {
        Matrix<T> m(dim(), dim());
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                if (cross_block(i, j)) m(i, j) = c_(i, j);
        return m;
    }

  private:
    Matrix<T> c_;
    int n1_;
};

/// Positive-definiteness check appropriate to the ring; for doubles a failed
/// factorization is retried once with the epsilon ridge, mirroring the
/// C + eps*I regularization knob.
inline Matrix<double> ensure_positive_definite(const Matrix<double>& m, double eps = 1e-10) {
    if (cholesky(m)) return m;
    Matrix<double> r = m;
    for (int i = 0; i < m.rows(); ++i) r(i, i) += eps;
    if (!cholesky(r))
        throw std::domain_error("covariance matrix not positive definite (even with epsilon ridge)");
    return r;
}

/// Determinant of the principal submatrix M_J. J must be nonempty; callers own
/// the empty-subset convention det over {} = 1.
template <CoefficientRing T>
T principal_minor_det(const Matrix<T>& m, SubsetIndex j) {
    if (j.empty()) throw std::invalid_argument("principal_minor_det: empty subset");
    return det(m.submatrix(j.mask, j.mask));
}

template <CoefficientRing T>
struct LeibnizExpansionResult {
    T lhs;  // det(I + A)
    T rhs;  // 1 + sum over nonempty J of det(A_J)
    bool equal;
};

/// det(I+A) = 1 + sum_{J nonempty} det(A_J), verified by full subset
/// enumeration (n <= 12).
template <CoefficientRing T>
LeibnizExpansionResult<T> leibniz_check(const Matrix<T>& a) {
    if (!a.is_square()) throw std::invalid_argument("leibniz_check: non-square matrix");
    const int n = a.rows();
    if (n > 12) throw std::invalid_argument("leibniz_check: n <= 12 (2^n subset enumeration)");
    T lhs = det(Matrix<T>::identity(n) + a);
    T rhs(1);
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask)
        rhs = rhs + principal_minor_det(a, SubsetIndex{mask});
    if constexpr (std::is_same_v<T, double>)
        return {lhs, rhs, approx_equal_rel(lhs, rhs, 1e-10)};
    else
        return {lhs, rhs, lhs == rhs};
}

/// a_J(tau) = -d/dtau det(C(tau)_J), via the trace identity
/// d det(M) = det(M) tr(M^{-1} dM) with dM the off-block pattern.
template <CoefficientRing T>
T a_subset_analytic(const CovarianceInterpolation<T>& ci, SubsetIndex j, const T& tau) {
    if (j.empty()) throw std::invalid_argument("a_subset_analytic: empty subset");
    Matrix<T> m = ci.interpolate(tau).submatrix(j.mask, j.mask);
    Matrix<T> dm = ci.tau_pattern().submatrix(j.mask, j.mask);
    auto minv = try_inverse(m);
    if (!minv) throw std::domain_error("a_subset_analytic: singular principal minor");
    T trace(0);
    Matrix<T> prod = *minv * dm;
    for (int i = 0; i < prod.rows(); ++i) trace = trace + prod(i, i);
    return -(det(m) * trace);
}

/// Same quantity through the effective-action route: write det(C(tau)_J) as a
/// fermionic Gaussian integral, decouple the second block by the shift
/// xi2' = xi2 + tau C22^{-1} C21 xi1 (Schur complement), and differentiate the
/// remaining J1-sector integral in tau. The insertion integral is evaluated by
/// the exterior engine, so this route shares no determinant code with
/// a_subset_analytic.
template <CoefficientRing T>
T a_subset_fermionic(const CovarianceInterpolation<T>& ci, SubsetIndex j, const T& tau) {
    if (j.empty()) throw std::invalid_argument("a_subset_fermionic: empty subset");
    const std::uint32_t j1 = SubsetIndex::block1(j.mask, ci.n1());
    const std::uint32_t j2 = SubsetIndex::block2(j.mask, ci.n1());
    // A subset inside one block has no tau dependence at all.
    if (j1 == 0 || j2 == 0) return T(0);

    const Matrix<T>& c = ci.matrix();
    Matrix<T> c11 = c.submatrix(j1, j1);
    Matrix<T> c12 = c.submatrix(j1, j2);
    Matrix<T> c21 = c.submatrix(j2, j1);
    Matrix<T> c22 = c.submatrix(j2, j2);

    auto c22_inv = try_inverse(c22);
    if (!c22_inv) throw std::domain_error("a_subset_fermionic: singular C22 block (use the analytic route)");
    Matrix<T> coupling = c12 * (*c22_inv) * c21;  // C12 C22^{-1} C21
    T tau_sq = tau * tau;
    Matrix<T> effective = c11 - tau_sq * coupling;  // Schur complement of C(tau)_J

    const int p = std::popcount(j1);
    GeneratorRegistry reg(p);
    GrassmannElement<T> weight = ext_exp(-bilinear_action(reg, effective));
    GrassmannElement<T> insertion = T(-2) * (tau * bilinear_action(reg, coupling));
    T integral = berezin_integrate(ext_mul(weight, insertion));
    return gaussian_fermionic_integral(c22) * integral;
}

/// Normalized fermionic expectation of prod_{i in J} (-2 xi_i eta_i) under the
/// action built from C(tau)^{-1}; the closed form it must reproduce is
/// 2^|J| det(C(tau)_J).
template <CoefficientRing T>
T wick_subset_expectation(const CovarianceInterpolation<T>& ci, SubsetIndex j, const T& tau) {
    Matrix<T> cfull = ci.interpolate(tau);
    auto inv = try_inverse(cfull);
    if (!inv) throw std::domain_error("wick_subset_expectation: C(tau) not invertible");

    GeneratorRegistry reg(ci.dim());
    GrassmannElement<T> weight = ext_exp(-bilinear_action(reg, *inv));
    GrassmannElement<T> observable = GrassmannElement<T>::scalar(reg, T(1));
    std::uint32_t rest = j.mask;
    while (rest) {
        const int i = std::countr_zero(rest);
        rest &= rest - 1;
        const std::uint64_t pair_mask =
            (std::uint64_t{1} << reg.xi(i).index) | (std::uint64_t{1} << reg.eta(i).index);
        observable = ext_mul(observable, GrassmannElement<T>::monomial(reg, pair_mask, T(-2)));
    }
    return det(cfull) * berezin_integrate(ext_mul(weight, observable));
}

}  // namespace supercube
