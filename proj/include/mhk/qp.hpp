#ifndef MHK_QP_HPP
#define MHK_QP_HPP

#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "mhk/core.hpp"

namespace mhk {

/// Standard SVM dual: min 1/2 a^T G a - sum a, s.t. sum a_i y_i = 0,
/// 0 <= a <= C. G carries the y_i y_j factors already (G_ij = y_i y_j K_ij).
struct DualProblem {
    Mat G;
    std::vector<int> y;  // labels in {-1, +1}
    double C = 1.0;
    double tol = 1e-3;

    void validate() const {
        auto n = static_cast<Eigen::Index>(y.size());
        require(n >= 2, "DualProblem: need N >= 2");
        require(G.rows() == n && G.cols() == n, "DualProblem: G size mismatch");
        require((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, G.cwiseAbs().maxCoeff()),
                "DualProblem: G not symmetric");
        require(C >= 0.0, "DualProblem: C must be >= 0");
        require(tol > 0.0, "DualProblem: tol must be > 0");
        bool pos = false, neg = false;
        for (int yi : y) {
            require(yi == 1 || yi == -1, "DualProblem: labels must be +-1");
            (yi == 1 ? pos : neg) = true;
        }
        require(pos && neg, "DualProblem: both label signs required");
    }
};

struct DualSolution {
    Vec alpha;
    double b = 0.0;
    int iterations = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;
};

namespace detail {

inline double dual_objective(const Mat& g, const Vec& a) {
    return 0.5 * a.dot(g * a) - a.sum();
}

}  // namespace detail

/// SMO with maximal-violating-pair selection (ties -> lowest index).
/// Deterministic: no randomness, fixed sweep order.
inline DualSolution solve_dual(const DualProblem& p, int max_passes = 1000) {
    p.validate();
    const auto n = static_cast<Eigen::Index>(p.y.size());
    DualSolution s;
    s.alpha = Vec::Zero(n);
    if (p.C == 0.0) {  // box collapses to the origin
        s.converged = true;
        return s;
    }

    Vec grad = Vec::Constant(n, -1.0);  // grad_i = (G a)_i - 1
    const double tau = 1e-12;

    auto in_up = [&](Eigen::Index t) {
        return (p.y[t] == 1 && s.alpha(t) < p.C) || (p.y[t] == -1 && s.alpha(t) > 0.0);
    };
    auto in_low = [&](Eigen::Index t) {
        return (p.y[t] == -1 && s.alpha(t) < p.C) || (p.y[t] == 1 && s.alpha(t) > 0.0);
    };

    double m_up = 0.0, m_low = 0.0;
    int iter = 0;
    for (; iter < max_passes * static_cast<int>(n); ++iter) {
        // maximal violating pair on -y grad
        Eigen::Index i = -1, j = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            double v = -p.y[t] * grad(t);
            if (in_up(t) && v > m_up) { m_up = v; i = t; }
            if (in_low(t) && v < m_low) { m_low = v; j = t; }
        }
        if (i < 0 || j < 0 || m_up - m_low <= p.tol) {
            s.converged = (i < 0 || j < 0) || (m_up - m_low <= p.tol);
            break;
        }

#ifndef NDEBUG
        double obj_before = detail::dual_objective(p.G, s.alpha);
#endif
        const double ai_old = s.alpha(i), aj_old = s.alpha(j);
        if (p.y[i] != p.y[j]) {
            double quad = p.G(i, i) + p.G(j, j) + 2.0 * p.G(i, j);
            if (quad <= tau) quad = tau;
            double delta = (-grad(i) - grad(j)) / quad;
            double diff = s.alpha(i) - s.alpha(j);
            s.alpha(i) += delta;
            s.alpha(j) += delta;
            if (diff > 0.0 && s.alpha(j) < 0.0) { s.alpha(j) = 0.0; s.alpha(i) = diff; }
            else if (diff <= 0.0 && s.alpha(i) < 0.0) { s.alpha(i) = 0.0; s.alpha(j) = -diff; }
            if (diff > 0.0 && s.alpha(i) > p.C) { s.alpha(i) = p.C; s.alpha(j) = p.C - diff; }
            else if (diff <= 0.0 && s.alpha(j) > p.C) { s.alpha(j) = p.C; s.alpha(i) = p.C + diff; }
        } else {
            double quad = p.G(i, i) + p.G(j, j) - 2.0 * p.G(i, j);
            if (quad <= tau) quad = tau;
            double delta = (grad(i) - grad(j)) / quad;
            double sum = s.alpha(i) + s.alpha(j);
            s.alpha(i) -= delta;
            s.alpha(j) += delta;
            if (sum > p.C) {
                if (s.alpha(i) > p.C) { s.alpha(i) = p.C; s.alpha(j) = sum - p.C; }
                else if (s.alpha(j) > p.C) { s.alpha(j) = p.C; s.alpha(i) = sum - p.C; }
            } else {
                if (s.alpha(j) < 0.0) { s.alpha(j) = 0.0; s.alpha(i) = sum; }
                else if (s.alpha(i) < 0.0) { s.alpha(i) = 0.0; s.alpha(j) = sum; }
            }
        }
        const double di = s.alpha(i) - ai_old, dj = s.alpha(j) - aj_old;
        grad += di * p.G.col(i) + dj * p.G.col(j);
#ifndef NDEBUG
        assert(detail::dual_objective(p.G, s.alpha) <= obj_before + 1e-10 * (1.0 + std::abs(obj_before)));
#endif
    }
    s.iterations = iter;

    // bias: mean of -y_i grad_i over free vectors, else the midpoint of the
    // KKT bound interval
    double acc = 0.0;
    int nfree = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (s.alpha(t) > 1e-8 && s.alpha(t) < p.C - 1e-8) {
            acc += -p.y[t] * grad(t);
            ++nfree;
        }
    }
    if (nfree > 0) {
        s.b = acc / nfree;
    } else {
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            double v = -p.y[t] * grad(t);
            if (in_up(t)) up = std::max(up, v);
            if (in_low(t)) low = std::min(low, v);
        }
        s.b = (std::isfinite(up) && std::isfinite(low)) ? 0.5 * (up + low) : 0.0;
    }

    // per-sample KKT residuals at the returned (alpha, b)
    double worst = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        // y_t f(x_t) = y_t (sum_j a_j y_j Khat_tj + b) = grad_t + 1 + y_t b
        double yf = grad(t) + 1.0 + p.y[t] * s.b;
        double viol;
        if (s.alpha(t) <= 1e-8) viol = std::max(0.0, 1.0 - yf);
        else if (s.alpha(t) >= p.C - 1e-8) viol = std::max(0.0, yf - 1.0);
        else viol = std::abs(yf - 1.0);
        worst = std::max(worst, viol);
    }
    s.max_kkt_violation = worst;
    return s;
}

struct KktReport {
    std::vector<double> violation;
    double max = 0.0;
};

/// Per-sample KKT residuals for the three regimes (alpha = 0, interior,
/// alpha = C) at a given feasible solution.
inline KktReport kkt_report(const DualProblem& p, const DualSolution& s) {
    const auto n = static_cast<Eigen::Index>(p.y.size());
    require(s.alpha.size() == n, "kkt_report: alpha size mismatch");
    double ya = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        require(s.alpha(t) >= -1e-8 && s.alpha(t) <= p.C + 1e-8, "kkt_report: alpha out of box");
        ya += s.alpha(t) * p.y[t];
    }
    require(std::abs(ya) <= 1e-8 * std::max(1.0, p.C * n), "kkt_report: equality constraint violated");

    Vec grad = p.G * s.alpha - Vec::Ones(n);
    KktReport rep;
    for (Eigen::Index t = 0; t < n; ++t) {
        double yf = grad(t) + 1.0 + p.y[t] * s.b;
        double viol;
        if (s.alpha(t) <= 1e-8) viol = std::max(0.0, 1.0 - yf);
        else if (s.alpha(t) >= p.C - 1e-8) viol = std::max(0.0, yf - 1.0);
        else viol = std::abs(yf - 1.0);
        rep.violation.push_back(viol);
        rep.max = std::max(rep.max, viol);
    }
    return rep;
}

}  // namespace mhk

#endif  // MHK_QP_HPP
