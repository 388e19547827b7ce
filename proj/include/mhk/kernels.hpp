#ifndef MHK_KERNELS_HPP
#define MHK_KERNELS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mhk/core.hpp"
#include "mhk/matspace.hpp"

namespace mhk {

enum class KernelFamily { linear, hadamard_poly, gaussian_cols, svd_matrix };
enum class BaseKernel { rbf, poly };

inline std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::linear: return "linear";
        case KernelFamily::hadamard_poly: return "hadamard_poly";
        case KernelFamily::gaussian_cols: return "gaussian_cols";
        case KernelFamily::svd_matrix: return "svd_matrix";
    }
    return "?";
}

inline KernelFamily kernel_family_from(const std::string& s) {
    if (s == "linear") return KernelFamily::linear;
    if (s == "hadamard_poly") return KernelFamily::hadamard_poly;
    if (s == "gaussian_cols") return KernelFamily::gaussian_cols;
    if (s == "svd_matrix") return KernelFamily::svd_matrix;
    throw std::invalid_argument("unknown kernel family: " + s);
}

struct KernelConfig {
    KernelFamily family = KernelFamily::linear;
    double alpha = 0.0;   // polynomial offset, >= 0
    int beta = 1;         // Hadamard exponent, >= 1
    double gamma = 1.0;   // Gaussian width, > 0
    BaseKernel base = BaseKernel::rbf;  // svd_matrix only
    double sigma = 1.0;   // base-kernel width / offset, > 0

    void validate() const {
        require(alpha >= 0.0, "KernelConfig: alpha must be >= 0");
        require(beta >= 1, "KernelConfig: beta must be >= 1");
        require(gamma > 0.0, "KernelConfig: gamma must be > 0");
        require(sigma > 0.0, "KernelConfig: sigma must be > 0");
    }
};

/// Block size of the kernel output for samples of the given shape.
inline Eigen::Index kernel_block_size(const KernelConfig& cfg,
                                      Eigen::Index rows, Eigen::Index cols) {
    if (cfg.family == KernelFamily::svd_matrix) return std::min(rows, cols);
    return cols;
}

inline Mat kernel_linear(const Mat& x, const Mat& y) {
    require_same_shape(x, y, "kernel_linear");
    return x.transpose() * y;
}

/// Entrywise beta-th power of (X^T Y + alpha I).
inline Mat kernel_hadamard_poly(const Mat& x, const Mat& y, double alpha, int beta) {
    require_same_shape(x, y, "kernel_hadamard_poly");
    require(alpha >= 0.0, "kernel_hadamard_poly: alpha must be >= 0");
    require(beta >= 1, "kernel_hadamard_poly: beta must be >= 1");
    Mat base = x.transpose() * y;
    base.diagonal().array() += alpha;
    Mat out = base;
    for (int k = 1; k < beta; ++k) out = out.cwiseProduct(base);
    return out;
}

/// Entry (i,j) = exp(-gamma * ||X(:,i) - Y(:,j)||^2).
inline Mat kernel_gaussian_cols(const Mat& x, const Mat& y, double gamma) {
    require_same_shape(x, y, "kernel_gaussian_cols");
    require(gamma > 0.0, "kernel_gaussian_cols: gamma must be > 0");
    Eigen::Index n = x.cols();
    Mat cross = x.transpose() * y;
    Vec xn = x.colwise().squaredNorm();
    Vec yn = y.colwise().squaredNorm();
    Mat out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double d2 = std::max(0.0, xn(i) + yn(j) - 2.0 * cross(i, j));
            out(i, j) = std::exp(-gamma * d2);
        }
    return out;
}

/// Thin-SVD features: W is (m+n) x c with column k = [U(:,k); V(:,k)],
/// c = min(m, n). Signs are fixed so the U-part entry of largest absolute
/// value is positive (ties resolved to the lowest row index), making the
/// output a deterministic function of X.
struct SvdFeatures {
    Mat W;       // (m+n) x c stacked [U; V]
    Vec sigma;   // descending singular values, length c
};

inline SvdFeatures svd_features(const Mat& x) {
    require(is_finite(x), "svd_features: non-finite entries");
    const Eigen::Index m = x.rows(), n = x.cols();
    const Eigen::Index c = std::min(m, n);
    SvdFeatures f;
    f.W.resize(m + n, c);
    if (x.isZero(0.0)) {
        // identity completion for the all-zero matrix
        f.W.setZero();
        for (Eigen::Index k = 0; k < c; ++k) {
            f.W(k, k) = 1.0;
            f.W(m + k, k) = 1.0;
        }
        f.sigma = Vec::Zero(c);
        return f;
    }
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Mat u = svd.matrixU();
    Mat v = svd.matrixV();
    f.sigma = svd.singularValues();
    for (Eigen::Index k = 0; k < c; ++k) {
        Eigen::Index pivot = 0;
        for (Eigen::Index i = 1; i < m; ++i)
            if (std::abs(u(i, k)) > std::abs(u(pivot, k))) pivot = i;
        if (u(pivot, k) < 0.0) {
            u.col(k) = -u.col(k);
            v.col(k) = -v.col(k);
        }
    }
    f.W.topRows(m) = u;
    f.W.bottomRows(n) = v;
    return f;
}

/// Base vector kernel on stacked feature columns.
inline double base_kernel_value(BaseKernel base, double sigma, double dot,
                                double nu, double nv) {
    if (base == BaseKernel::rbf) {
        double d2 = std::max(0.0, nu + nv - 2.0 * dot);
        return std::exp(-sigma * d2);
    }
    double t = dot + sigma;
    return t * t;  // polynomial kernel, degree 2
}

/// c x c kernel block from precomputed SVD features of both operands.
inline Mat kernel_svd_from_features(const SvdFeatures& fx, const SvdFeatures& fy,
                                    BaseKernel base, double sigma) {
    require(fx.W.rows() == fy.W.rows() && fx.W.cols() == fy.W.cols(),
            "kernel_svd_from_features: feature shape mismatch");
    Mat cross = fx.W.transpose() * fy.W;
    Vec nx = fx.W.colwise().squaredNorm();
    Vec ny = fy.W.colwise().squaredNorm();
    Mat out(cross.rows(), cross.cols());
    for (Eigen::Index i = 0; i < cross.rows(); ++i)
        for (Eigen::Index j = 0; j < cross.cols(); ++j)
            out(i, j) = base_kernel_value(base, sigma, cross(i, j), nx(i), ny(j));
    return out;
}

inline Mat kernel_svd_matrix(const Mat& x, const Mat& y, const KernelConfig& cfg) {
    require_same_shape(x, y, "kernel_svd_matrix");
    return kernel_svd_from_features(svd_features(x), svd_features(y), cfg.base, cfg.sigma);
}

/// Dispatch a configured kernel family on one sample pair.
inline Mat kernel_eval(const KernelConfig& cfg, const Mat& x, const Mat& y) {
    switch (cfg.family) {
        case KernelFamily::linear: return kernel_linear(x, y);
        case KernelFamily::hadamard_poly: return kernel_hadamard_poly(x, y, cfg.alpha, cfg.beta);
        case KernelFamily::gaussian_cols: return kernel_gaussian_cols(x, y, cfg.gamma);
        case KernelFamily::svd_matrix: return kernel_svd_matrix(x, y, cfg);
    }
    throw std::logic_error("kernel_eval: unreachable");
}

/// N x N grid of c x c kernel blocks, symmetric under block transpose.
struct BlockGram {
    Eigen::Index N = 0;
    Eigen::Index c = 0;
    std::vector<Mat> blocks;  // row-major N*N

    const Mat& at(Eigen::Index i, Eigen::Index j) const { return blocks[i * N + j]; }
    Mat& at(Eigen::Index i, Eigen::Index j) { return blocks[i * N + j]; }
};

/// Caches per-sample state (SVD features) so kernel blocks against a fixed
/// sample list are cheap. Blocks are identical to kernel_eval on the raw pair.
class CachedKernel {
public:
    CachedKernel(const KernelConfig& cfg, const std::vector<Mat>& samples)
        : cfg_(cfg), samples_(&samples) {
        cfg_.validate();
        require(!samples.empty(), "CachedKernel: empty sample list");
        for (std::size_t i = 1; i < samples.size(); ++i)
            require_same_shape(samples[0], samples[i], "CachedKernel");
        if (cfg_.family == KernelFamily::svd_matrix) {
            feats_.reserve(samples.size());
            for (const Mat& s : samples) feats_.push_back(svd_features(s));
        }
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(samples_->size()); }

    Eigen::Index block_size() const {
        return kernel_block_size(cfg_, (*samples_)[0].rows(), (*samples_)[0].cols());
    }

    Mat block(Eigen::Index i, Eigen::Index j) const {
        if (cfg_.family == KernelFamily::svd_matrix)
            return kernel_svd_from_features(feats_[i], feats_[j], cfg_.base, cfg_.sigma);
        return kernel_eval(cfg_, (*samples_)[i], (*samples_)[j]);
    }

    /// K(X_i, X) for an out-of-set sample with precomputed features.
    Mat block_against(Eigen::Index i, const Mat& x, const SvdFeatures& fx) const {
        if (cfg_.family == KernelFamily::svd_matrix)
            return kernel_svd_from_features(feats_[i], fx, cfg_.base, cfg_.sigma);
        return kernel_eval(cfg_, (*samples_)[i], x);
    }

    const KernelConfig& config() const { return cfg_; }

private:
    KernelConfig cfg_;
    const std::vector<Mat>* samples_;
    std::vector<SvdFeatures> feats_;
};

/// Assembles the full block Gram; only the upper triangle is evaluated,
/// the lower is filled by block transpose (Def-13 symmetry).
inline BlockGram assemble_gram(const std::vector<Mat>& samples, const KernelConfig& cfg) {
    CachedKernel ker(cfg, samples);
    BlockGram g;
    g.N = ker.size();
    g.c = ker.block_size();
    g.blocks.resize(static_cast<std::size_t>(g.N) * g.N);
    for (Eigen::Index i = 0; i < g.N; ++i)
        for (Eigen::Index j = i; j < g.N; ++j) {
            g.at(i, j) = ker.block(i, j);
            if (j != i) g.at(j, i) = g.at(i, j).transpose();
        }
    return g;
}

struct PsdKernelReport {
    std::vector<double> min_eig_per_trial;
    bool pass = false;
};

/// Randomized check of the PSD-kernel property: draws coefficients
/// a_i ~ U(-1, 1) and verifies sum_ij a_i a_j K(X_i, X_j) has no eigenvalue
/// below -1e-8 * max(1, lambda_max).
inline PsdKernelReport check_psd_kernel(
    const std::vector<Mat>& samples, int trials,
    const std::function<Mat(const Mat&, const Mat&)>& kernel, std::uint64_t seed) {
    require(samples.size() >= 2, "check_psd_kernel: need >= 2 samples");
    const auto n = static_cast<Eigen::Index>(samples.size());
    std::vector<Mat> blocks(static_cast<std::size_t>(n) * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            blocks[i * n + j] = kernel(samples[i], samples[j]);
            if (j != i) blocks[j * n + i] = blocks[i * n + j].transpose();
        }
    Rng rng(seed);
    PsdKernelReport rep;
    rep.pass = true;
    const Eigen::Index c = blocks[0].rows();
    for (int t = 0; t < trials; ++t) {
        Vec a(n);
        for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-1.0, 1.0);
        Mat s = Mat::Zero(c, c);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                s += a(i) * a(j) * blocks[i * n + j];
        Mat sym = 0.5 * (s + s.transpose());
        auto [lmin, lmax] = sym_eig_range(sym);
        rep.min_eig_per_trial.push_back(lmin);
        if (lmin < -1e-8 * std::max(1.0, lmax)) rep.pass = false;
    }
    return rep;
}

inline PsdKernelReport check_psd_kernel(const std::vector<Mat>& samples, int trials,
                                        const KernelConfig& cfg, std::uint64_t seed) {
    return check_psd_kernel(
        samples, trials,
        [&cfg](const Mat& x, const Mat& y) { return kernel_eval(cfg, x, y); }, seed);
}

}  // namespace mhk

#endif  // MHK_KERNELS_HPP
