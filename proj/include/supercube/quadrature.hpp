#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "supercube/matrix.hpp"
#include "supercube/normal.hpp"

namespace supercube {

/// Gauss-Legendre nodes and weights on [-1,1], computed once per order by
/// Newton iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const GaussLegendre& order(int m) {
        static GaussLegendre cache16 = compute(16);
        static GaussLegendre cache32 = compute(32);
        if (m == 16) return cache16;
        if (m == 32) return cache32;
        throw std::invalid_argument("GaussLegendre: only orders 16 and 32 are cached");
    }

    static GaussLegendre compute(int m) {
        GaussLegendre g;
        g.nodes.resize(static_cast<size_t>(m));
        g.weights.resize(static_cast<size_t>(m));
        for (int i = 0; i < (m + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            g.nodes[static_cast<size_t>(i)] = -x;
            g.weights[static_cast<size_t>(i)] = w;
            g.nodes[static_cast<size_t>(m - 1 - i)] = x;
            g.weights[static_cast<size_t>(m - 1 - i)] = w;
        }
        return g;
    }
};

/// Composite fixed-grid integral: `panels` equal panels, Gauss-Legendre of the
/// given order on each. Deterministic node set for a given (panels, order).
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order = 16) {
    const GaussLegendre& g = GaussLegendre::order(order);
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        double s = 0.0;
        for (size_t k = 0; k < g.nodes.size(); ++k)
            s += g.weights[k] * f(lo + 0.5 * h * (g.nodes[k] + 1.0));
        acc += 0.5 * h * s;
    }
    return acc;
}

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // last refinement delta
    int level = 0;       // panels = 2^level per dimension
    bool converged = false;
};

/// Panel-doubling refinement until successive values differ by at most `tol`.
template <class F>
QuadratureResult integrate_refining(F&& f, double a, double b, double tol, int max_level = 10) {
    QuadratureResult r;
    double prev = integrate_panels(f, a, b, 1);
    for (int level = 1; level <= max_level; ++level) {
        double cur = integrate_panels(f, a, b, 1 << level);
        r.value = cur;
        r.error = std::fabs(cur - prev);
        r.level = level;
        if (r.error <= tol) {
            r.converged = true;
            return r;
        }
        prev = cur;
    }
    return r;
}

/// Gaussian probability of the centered cube [-1,1]^n for n <= 3, by
/// sequential conditioning: the last coordinate contributes a conditional
/// normal interval in closed form, the remaining ones are integrated on a
/// tensor Gauss-Legendre grid refined until `tol`. `forced_level >= 0` pins
/// the grid (matched-grid finite differencing across tau).
class CubeQuadrature {
  public:
    explicit CubeQuadrature(const Matrix<double>& sigma) : sigma_(sigma) {
        const int n = sigma.rows();
        if (n < 1 || n > 3) throw std::invalid_argument("CubeQuadrature: dimension must be 1..3");
        if (!cholesky(sigma)) throw std::domain_error("CubeQuadrature: covariance not positive definite");
        if (n >= 2) {
            // Conditional law of x_n given the leading block.
            const std::uint32_t lead = (std::uint32_t{1} << (n - 1)) - 1;
            Matrix<double> head = sigma.submatrix(lead, lead);
            head_inv_ = *try_inverse(head);
            head_det_ = det_lu(head);
            cross_.resize(static_cast<size_t>(n - 1));
            for (int i = 0; i < n - 1; ++i) cross_[static_cast<size_t>(i)] = sigma(n - 1, i);
            double shrink = 0.0;
            for (int i = 0; i < n - 1; ++i)
                for (int j = 0; j < n - 1; ++j)
                    shrink += cross_[static_cast<size_t>(i)] * head_inv_(i, j) * cross_[static_cast<size_t>(j)];
            cond_var_ = sigma(n - 1, n - 1) - shrink;
            if (cond_var_ <= 0.0) throw std::domain_error("CubeQuadrature: degenerate conditional variance");
        }
    }

    QuadratureResult evaluate(double tol, int forced_level = -1) const {
        const int n = sigma_.rows();
        if (n == 1) {
            const double s = std::sqrt(sigma_(0, 0));
            return {normal_interval(-1.0 / s, 1.0 / s), 0.0, 0, true};
        }
        if (forced_level >= 0) {
            QuadratureResult r;
            r.value = grid_value(forced_level);
            r.error = tol;
            r.level = forced_level;
            r.converged = true;
            return r;
        }
        QuadratureResult r;
        double prev = grid_value(1);
        for (int level = 2; level <= 7; ++level) {
            double cur = grid_value(level);
            r.value = cur;
            r.error = std::fabs(cur - prev);
            r.level = level;
            if (r.error <= tol) {
                r.converged = true;
                return r;
            }
            prev = cur;
        }
        return r;
    }

  private:
    double integrand(const double* x, int m) const {
        // Density of the leading m coordinates times the conditional interval
        // probability of the last one.
        double quad = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) quad += x[i] * head_inv_(i, j) * x[j];
        double dens = std::exp(-0.5 * quad) /
                      std::pow(2.0 * std::numbers::pi, 0.5 * m) / std::sqrt(head_det_);
        double mu = 0.0;
        for (int i = 0; i < m; ++i) {
            double w = 0.0;
            for (int j = 0; j < m; ++j) w += head_inv_(i, j) * x[j];
            mu += cross_[static_cast<size_t>(i)] * w;
        }
        const double sd = std::sqrt(cond_var_);
        return dens * normal_interval((-1.0 - mu) / sd, (1.0 - mu) / sd);
    }

    double grid_value(int level) const {
        const int n = sigma_.rows();
        const int panels = 1 << level;
        if (n == 2) {
            return integrate_panels([this](double x) { return integrand(&x, 1); }, -1.0, 1.0, panels);
        }
        return integrate_panels(
            [this, panels](double x0) {
                return integrate_panels(
                    [this, x0](double x1) {
                        const double pt[2] = {x0, x1};
                        return integrand(pt, 2);
                    },
                    -1.0, 1.0, panels);
            },
            -1.0, 1.0, panels);
    }

    Matrix<double> sigma_;
    Matrix<double> head_inv_;
    double head_det_ = 1.0;
    std::vector<double> cross_;
    double cond_var_ = 0.0;
};

}  // namespace supercube
