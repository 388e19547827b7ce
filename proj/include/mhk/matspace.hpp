#ifndef MHK_MATSPACE_HPP
#define MHK_MATSPACE_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "mhk/core.hpp"

namespace mhk {

inline double frobenius_norm(const Mat& m) { return m.norm(); }

/// Largest singular value, computed as sqrt(lambda_max(M^T M)) through a
/// symmetric eigen-decomposition. Deterministic, no power iteration.
inline double spectral_norm(const Mat& m) {
    Mat gram = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

/// Smallest and largest eigenvalue of a symmetric matrix.
inline std::pair<double, double> sym_eig_range(const Mat& s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// The n x n matrix inner product <X, Y> = X^T Y on R^{m x n}.
inline Mat inner_dot(const Mat& x, const Mat& y) {
    require_same_shape(x, y, "inner_dot");
    return x.transpose() * y;
}

/// Weight function x -> W(x), an n x n symmetric PSD matrix on (a, b).
struct WeightFn {
    std::function<Mat(double)> evaluator;
    double a = 0.0;
    double b = 1.0;
};

/// Polynomial with n x n matrix coefficients, degree-ascending.
struct MatPoly {
    std::vector<Mat> coeffs;

    Eigen::Index block_size() const {
        require(!coeffs.empty(), "MatPoly: empty coefficient list");
        return coeffs.front().rows();
    }

    Mat eval(double x) const {
        Eigen::Index n = block_size();
        Mat acc = Mat::Zero(n, n);
        double p = 1.0;
        for (const Mat& c : coeffs) {
            require(c.rows() == n && c.cols() == n, "MatPoly: ragged coefficient block");
            acc += p * c;
            p *= x;
        }
        return acc;
    }
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
/// Exact for polynomials of degree <= 2n - 1.
inline void gauss_legendre(int order, std::vector<double>& nodes,
                           std::vector<double>& weights) {
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based starting guess
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

}  // namespace detail

/// <P, Q> = integral over (a, b) of P(x)^T W(x) Q(x) dx by Gauss-Legendre
/// quadrature. Exact (to roundoff) when the integrand entries are
/// polynomials of degree <= 2 * quad_order - 1.
inline Mat inner_poly(const MatPoly& p, const MatPoly& q, const WeightFn& w,
                      int quad_order) {
    require(quad_order >= 1, "inner_poly: quad_order must be >= 1");
    Eigen::Index n = p.block_size();
    require(q.block_size() == n, "inner_poly: block-size mismatch between P and Q");
    require(w.a < w.b, "inner_poly: weight interval must have a < b");

    std::vector<double> nodes, weights;
    detail::gauss_legendre(quad_order, nodes, weights);

    const double mid = 0.5 * (w.a + w.b);
    const double halflen = 0.5 * (w.b - w.a);
    Mat acc = Mat::Zero(n, n);
    for (int k = 0; k < quad_order; ++k) {
        double x = mid + halflen * nodes[k];
        Mat wx = w.evaluator(x);
        require(wx.rows() == n && wx.cols() == n, "inner_poly: weight block-size mismatch");
        acc += (halflen * weights[k]) * (p.eval(x).transpose() * wx * q.eval(x));
    }
    return acc;
}

struct CauchySchwarzReport {
    double lhs = 0.0;   // ||<X,Y>||_2^2
    double rhs = 0.0;   // ||<X,X>||_2 * ||<Y,Y>||_2
    bool holds = false;
};

/// Checks ||<X,Y>||_2^2 <= ||<X,X>||_2 ||<Y,Y>||_2 with scale-aware slack.
inline CauchySchwarzReport check_cauchy_schwarz(
    const Mat& x, const Mat& y,
    const std::function<Mat(const Mat&, const Mat&)>& inner = inner_dot) {
    require_same_shape(x, y, "check_cauchy_schwarz");
    CauchySchwarzReport r;
    double cross = spectral_norm(inner(x, y));
    r.lhs = cross * cross;
    r.rhs = spectral_norm(inner(x, x)) * spectral_norm(inner(y, y));
    r.holds = r.lhs <= r.rhs + 1e-9 * std::max(1.0, r.rhs);
    return r;
}

}  // namespace mhk

#endif  // MHK_MATSPACE_HPP
