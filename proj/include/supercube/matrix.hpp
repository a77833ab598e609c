#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "supercube/polynomial.hpp"
#include "supercube/ring.hpp"

namespace supercube {

/// Dense matrix over an arbitrary coefficient ring. Everything here targets the
/// small sizes this toolkit works at (n <= 12), so the algorithms favor
/// exactness and clarity over blocking.
template <CoefficientRing T>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, T init = T(0))
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), init) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative size");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int i, int j) { return data_[static_cast<size_t>(i * cols_ + j)]; }
    const T& operator()(int i, int j) const { return data_[static_cast<size_t>(i * cols_ + j)]; }

    /// Rows/columns with set bits are kept, in ascending index order.
    Matrix submatrix(std::uint32_t row_mask, std::uint32_t col_mask) const {
        std::vector<int> ri = mask_indices(row_mask, rows_);
        std::vector<int> ci = mask_indices(col_mask, cols_);
        Matrix m(static_cast<int>(ri.size()), static_cast<int>(ci.size()));
        for (size_t i = 0; i < ri.size(); ++i)
            for (size_t j = 0; j < ci.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = (*this)(ri[i], ci[j]);
        return m;
    }

    Matrix transposed() const {
        Matrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        check_same_shape(a, b);
        Matrix m(a.rows_, a.cols_);
        for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] + b.data_[k];
        return m;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        check_same_shape(a, b);
        Matrix m(a.rows_, a.cols_);
        for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] - b.data_[k];
        return m;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
        Matrix m(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (is_ring_zero(aik)) continue;
                for (int j = 0; j < b.cols_; ++j) m(i, j) = m(i, j) + aik * b(k, j);
            }
        return m;
    }
    friend Matrix operator*(const T& s, const Matrix& a) {
        Matrix m(a.rows_, a.cols_);
        for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = s * a.data_[k];
        return m;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    bool is_square() const { return rows_ == cols_; }

    bool is_symmetric() const
        requires(!std::is_same_v<T, double>)
    {
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if (!((*this)(i, j) == (*this)(j, i))) return false;
        return true;
    }

    bool is_symmetric(double tol) const
        requires std::is_same_v<T, double>
    {
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

  private:
    static std::vector<int> mask_indices(std::uint32_t mask, int limit) {
        std::vector<int> idx;
        for (int i = 0; i < limit; ++i)
            if (mask & (std::uint32_t{1} << i)) idx.push_back(i);
        if (mask >> limit) throw std::invalid_argument("Matrix: subset mask out of range");
        return idx;
    }

    static void check_same_shape(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }

    int rows_, cols_;
    std::vector<T> data_;
};

/// Division-free determinant by cofactor expansion. Works over any commutative
/// ring (polynomial entries included); intended for n <= 8.
template <CoefficientRing T>
T det_cofactor(const Matrix<T>& m) {
    if (!m.is_square()) throw std::invalid_argument("det: non-square matrix");
    const int n = m.rows();
    if (n == 0) return T(1);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    T acc(0);
    std::uint32_t all = (std::uint32_t{1} << n) - 1;
    for (int j = 0; j < n; ++j) {
        if (is_ring_zero(m(0, j))) continue;
        Matrix<T> minor = m.submatrix(all & ~std::uint32_t{1}, all & ~(std::uint32_t{1} << j));
        T term = m(0, j) * det_cofactor(minor);
        if (j % 2 == 0)
            acc = acc + term;
        else
            acc = acc - term;
    }
    return acc;
}

/// Fraction-free Gaussian elimination (Bareiss). Exact over the rationals; the
/// independent oracle the fermionic determinant route is checked against.
template <CoefficientRing T>
T det_bareiss(const Matrix<T>& m) {
    if (!m.is_square()) throw std::invalid_argument("det: non-square matrix");
    const int n = m.rows();
    if (n == 0) return T(1);
    Matrix<T> a = m;
    T prev(1);
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (is_ring_zero(a(k, k))) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (!is_ring_zero(a(i, k))) {
                    p = i;
                    break;
                }
            if (p < 0) return T(0);
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a(i, j) = (a(k, k) * a(i, j) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    T d = a(n - 1, n - 1);
    return sign > 0 ? d : -d;
}

namespace detail {
// Bareiss divides by a previous pivot; that division must be exact. True for
// fields (rationals, doubles); polynomials fall back to cofactor expansion.
template <class T>
inline constexpr bool has_exact_division_v = true;
template <class C>
inline constexpr bool has_exact_division_v<Polynomial<C>> = false;
}  // namespace detail

double det_lu(const Matrix<double>& m);

/// Size- and ring-appropriate determinant.
template <CoefficientRing T>
T det(const Matrix<T>& m) {
    if constexpr (std::is_same_v<T, double>)
        return det_lu(m);
    else if constexpr (detail::has_exact_division_v<T>)
        return det_bareiss(m);
    else
        return det_cofactor(m);
}

inline double det_lu(const Matrix<double>& m) {
    if (!m.is_square()) throw std::invalid_argument("det: non-square matrix");
    const int n = m.rows();
    Matrix<double> a = m;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
        if (a(p, k) == 0.0) return 0.0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

/// Gauss-Jordan inverse; requires field coefficients. Returns nullopt when
/// singular (exactly singular for rationals, pivot below `pivot_tol` for doubles).
template <CoefficientRing T>
std::optional<Matrix<T>> try_inverse(const Matrix<T>& m, double pivot_tol = 1e-12) {
    if (!m.is_square()) throw std::invalid_argument("inverse: non-square matrix");
    const int n = m.rows();
    Matrix<T> a = m;
    Matrix<T> inv = Matrix<T>::identity(n);
    for (int k = 0; k < n; ++k) {
        int p = -1;
        if constexpr (std::is_same_v<T, double>) {
            p = k;
            for (int i = k + 1; i < n; ++i)
                if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
            if (std::fabs(a(p, k)) <= pivot_tol) return std::nullopt;
        } else {
            for (int i = k; i < n; ++i)
                if (!is_ring_zero(a(i, k))) {
                    p = i;
                    break;
                }
            if (p < 0) return std::nullopt;
        }
        if (p != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        T piv = a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) = a(k, j) / piv;
            inv(k, j) = inv(k, j) / piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || is_ring_zero(a(i, k))) continue;
            T f = a(i, k);
            for (int j = 0; j < n; ++j) {
                a(i, j) = a(i, j) - f * a(k, j);
                inv(i, j) = inv(i, j) - f * inv(k, j);
            }
        }
    }
    return inv;
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix,
/// or nullopt when the factorization breaks down.
inline std::optional<Matrix<double>> cholesky(const Matrix<double>& m) {
    if (!m.is_square()) throw std::invalid_argument("cholesky: non-square matrix");
    const int n = m.rows();
    Matrix<double> l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return std::nullopt;
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

/// Exact positive-definiteness via Sylvester's criterion (leading principal
/// minors all positive). Rational matrices only.
inline bool sylvester_positive_definite(const Matrix<Rational>& m) {
    if (!m.is_square() || !m.is_symmetric()) return false;
    const int n = m.rows();
    for (int k = 1; k <= n; ++k) {
        std::uint32_t mask = (std::uint32_t{1} << k) - 1;
        if (!(det_bareiss(m.submatrix(mask, mask)) > 0)) return false;
    }
    return true;
}

/// Solve L y = b for lower-triangular L (forward substitution).
inline std::vector<double> solve_lower(const Matrix<double>& l, const std::vector<double>& b) {
    const int n = l.rows();
    std::vector<double> y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<size_t>(i)];
        for (int j = 0; j < i; ++j) s -= l(i, j) * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s / l(i, i);
    }
    return y;
}

template <CoefficientRing T>
Matrix<double> to_double_matrix(const Matrix<T>& m) {
    Matrix<double> r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
    return r;
}

}  // namespace supercube
