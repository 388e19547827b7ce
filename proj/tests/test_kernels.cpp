#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mhk/kernels.hpp"
#include "mhk/matspace.hpp"

using namespace mhk;

namespace {

std::vector<Mat> random_samples(Rng& rng, int n, int rows, int cols) {
    std::vector<Mat> out;
    for (int i = 0; i < n; ++i) out.push_back(random_matrix(rng, rows, cols));
    return out;
}

}  // namespace

TEST_CASE("kernel_linear equals inner_dot") {
    CHECK(kernel_linear(Mat::Identity(3, 3), Mat::Identity(3, 3)).isApprox(Mat::Identity(3, 3)));
    CHECK(kernel_linear(Mat::Zero(3, 3), Mat::Identity(3, 3)).isZero(0.0));
    Rng rng(21);
    Mat x = random_matrix(rng, 4, 3), y = random_matrix(rng, 4, 3);
    CHECK(kernel_linear(x, y).isApprox(inner_dot(x, y)));
    CHECK_THROWS_AS(kernel_linear(x, Mat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("kernel_hadamard_poly") {
    Rng rng(22);
    Mat x = random_matrix(rng, 3, 3), y = random_matrix(rng, 3, 3);
    SUBCASE("degenerate parameters reduce to linear, exactly") {
        CHECK((kernel_hadamard_poly(x, y, 0.0, 1) - kernel_linear(x, y)).isZero(0.0));
    }
    SUBCASE("identity case") {
        Mat k = kernel_hadamard_poly(Mat::Identity(2, 2), Mat::Identity(2, 2), 1.0, 2);
        Mat expect(2, 2);
        expect << 4, 0, 0, 4;
        CHECK(k.isApprox(expect));
    }
    SUBCASE("per-entry scalar oracle, beta = 3") {
        double alpha = 0.7;
        Mat k = kernel_hadamard_poly(x, y, alpha, 3);
        Mat base = x.transpose() * y;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = base(i, j) + (i == j ? alpha : 0.0);
                CHECK(k(i, j) == doctest::Approx(v * v * v).epsilon(1e-12));
            }
    }
}

TEST_CASE("kernel_gaussian_cols") {
    Rng rng(23);
    Mat x = random_matrix(rng, 4, 3);
    SUBCASE("zero distance gives unit diagonal") {
        Mat k = kernel_gaussian_cols(x, x, 0.5);
        for (int i = 0; i < 3; ++i) CHECK(k(i, i) == doctest::Approx(1.0));
    }
    SUBCASE("identical columns give all ones") {
        Mat rep(4, 3);
        rep.col(0) = x.col(0);
        rep.col(1) = x.col(0);
        rep.col(2) = x.col(0);
        Mat k = kernel_gaussian_cols(rep, rep, 2.0);
        CHECK((k.array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
    SUBCASE("hand-computed scalar case") {
        Mat a(2, 1), b(2, 1);
        a << 0, 0;
        b << 3, 4;
        Mat k = kernel_gaussian_cols(a, b, 0.01);
        CHECK(k(0, 0) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    }
    SUBCASE("shape mismatch rejected") {
        CHECK_THROWS_AS(kernel_gaussian_cols(x, Mat::Zero(5, 3), 1.0), std::invalid_argument);
    }
}

TEST_CASE("svd_features: identity input under the sign/order convention") {
    auto f = svd_features(Mat::Identity(3, 3));
    CHECK(f.sigma.isApprox(Vec::Ones(3)));
    // each W column must be [e_i; e_i] for some ordering; convention pins e_k
    for (int k = 0; k < 3; ++k) {
        Vec col = f.W.col(k);
        CHECK(col(k) == doctest::Approx(1.0));
        CHECK(col(3 + k) == doctest::Approx(1.0));
        CHECK(col.squaredNorm() == doctest::Approx(2.0));
    }
}

TEST_CASE("svd_features: diagonal matrix") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 5.0;
    d(1, 1) = 3.0;
    auto f = svd_features(d);
    CHECK(f.sigma(0) == doctest::Approx(5.0));
    CHECK(f.sigma(1) == doctest::Approx(3.0));
    CHECK(f.W(0, 0) == doctest::Approx(1.0));
    CHECK(f.W(2, 0) == doctest::Approx(1.0));
    CHECK(f.W(1, 1) == doctest::Approx(1.0));
    CHECK(f.W(3, 1) == doctest::Approx(1.0));
}

TEST_CASE("svd_features: residual and orthonormality on random input") {
    Rng rng(24);
    Mat x = random_matrix(rng, 4, 6);
    auto f = svd_features(x);
    const int c = 4;
    Mat u = f.W.topRows(4), v = f.W.bottomRows(6);
    CHECK((u.transpose() * u - Mat::Identity(c, c)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((x * v - u * f.sigma.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((x - u * f.sigma.asDiagonal() * v.transpose()).norm()
          <= 1e-8 * std::max(1.0, x.norm()));
    for (int k = 1; k < c; ++k) CHECK(f.sigma(k) <= f.sigma(k - 1) + 1e-15);
}

TEST_CASE("svd_features: determinism, bit-identical") {
    Rng rng(25);
    Mat x = random_matrix(rng, 5, 4);
    auto f1 = svd_features(x);
    auto f2 = svd_features(x);
    CHECK((f1.W - f2.W).isZero(0.0));
    CHECK((f1.sigma - f2.sigma).isZero(0.0));
}

TEST_CASE("svd_features: zero matrix gets the identity completion") {
    auto f = svd_features(Mat::Zero(3, 5));
    CHECK(f.sigma.isZero(0.0));
    for (int k = 0; k < 3; ++k) {
        CHECK(f.W(k, k) == 1.0);
        CHECK(f.W(3 + k, k) == 1.0);
    }
}

TEST_CASE("kernel_svd_matrix: rbf diagonal is one at X == Y") {
    Rng rng(26);
    Mat x = random_matrix(rng, 4, 3);
    KernelConfig cfg;
    cfg.family = KernelFamily::svd_matrix;
    cfg.base = BaseKernel::rbf;
    cfg.sigma = 0.3;
    Mat k = kernel_svd_matrix(x, x, cfg);
    for (int i = 0; i < 3; ++i) CHECK(k(i, i) == doctest::Approx(1.0));
}

TEST_CASE("kernel_svd_matrix: identity input, off-diagonal rbf value") {
    // for X = Y = I_m the stacked features are [e_i; e_i], so
    // ||w_i - w_j||^2 = 4 off the diagonal
    KernelConfig cfg;
    cfg.family = KernelFamily::svd_matrix;
    cfg.base = BaseKernel::rbf;
    cfg.sigma = 0.25;
    Mat k = kernel_svd_matrix(Mat::Identity(3, 3), Mat::Identity(3, 3), cfg);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(k(i, j) == doctest::Approx(i == j ? 1.0 : std::exp(-4.0 * cfg.sigma)));
}

TEST_CASE("kernel_svd_matrix: poly base matches per-entry recomputation") {
    Rng rng(27);
    Mat x = random_matrix(rng, 4, 3), y = random_matrix(rng, 4, 3);
    KernelConfig cfg;
    cfg.family = KernelFamily::svd_matrix;
    cfg.base = BaseKernel::poly;
    cfg.sigma = 0.8;
    Mat k = kernel_svd_matrix(x, y, cfg);
    auto fx = svd_features(x), fy = svd_features(y);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double dot = fx.W.col(i).dot(fy.W.col(j));
            double v = (dot + cfg.sigma) * (dot + cfg.sigma);
            CHECK(k(i, j) == doctest::Approx(v).epsilon(1e-12));
        }
}

TEST_CASE("assemble_gram") {
    Rng rng(28);
    KernelConfig cfg;
    SUBCASE("single sample: symmetric PSD diagonal block") {
        auto g = assemble_gram({random_matrix(rng, 4, 3)}, cfg);
        CHECK(g.N == 1);
        auto [lmin, lmax] = sym_eig_range(0.5 * (g.at(0, 0) + g.at(0, 0).transpose()));
        CHECK(lmin >= -1e-9 * std::max(1.0, lmax));
    }
    SUBCASE("two samples match direct kernel calls") {
        auto xs = random_samples(rng, 2, 4, 3);
        auto g = assemble_gram(xs, cfg);
        CHECK(g.at(0, 1).isApprox(kernel_linear(xs[0], xs[1])));
        CHECK(g.at(1, 0).isApprox(kernel_linear(xs[1], xs[0])));
    }
    SUBCASE("block-transpose symmetry for every family") {
        auto xs = random_samples(rng, 5, 4, 3);
        for (auto family : {KernelFamily::linear, KernelFamily::hadamard_poly,
                            KernelFamily::gaussian_cols, KernelFamily::svd_matrix}) {
            KernelConfig c;
            c.family = family;
            c.alpha = 0.5;
            c.beta = 2;
            auto g = assemble_gram(xs, c);
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    CHECK((g.at(j, i) - g.at(i, j).transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("heterogeneous shapes rejected") {
        std::vector<Mat> bad = {Mat::Zero(2, 2), Mat::Zero(3, 3)};
        CHECK_THROWS_AS(assemble_gram(bad, cfg), std::invalid_argument);
    }
}

TEST_CASE("Def-13 symmetry K(X,Y) = K(Y,X)^T for every family") {
    Rng rng(29);
    for (auto family : {KernelFamily::linear, KernelFamily::hadamard_poly,
                        KernelFamily::gaussian_cols, KernelFamily::svd_matrix}) {
        KernelConfig cfg;
        cfg.family = family;
        cfg.alpha = 1.0;
        cfg.beta = 2;
        cfg.gamma = 0.7;
        cfg.sigma = 0.5;
        for (int t = 0; t < 25; ++t) {
            Mat x = random_matrix(rng, 4, 3), y = random_matrix(rng, 4, 3);
            Mat kxy = kernel_eval(cfg, x, y);
            Mat kyx = kernel_eval(cfg, y, x);
            CHECK((kyx - kxy.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("check_psd_kernel: all four families pass the randomized sweep") {
    Rng rng(30);
    auto xs = random_samples(rng, 5, 4, 3);
    for (auto family : {KernelFamily::linear, KernelFamily::hadamard_poly,
                        KernelFamily::gaussian_cols, KernelFamily::svd_matrix}) {
        KernelConfig cfg;
        cfg.family = family;
        cfg.alpha = 0.5;
        cfg.beta = 2;
        cfg.base = BaseKernel::rbf;
        auto rep = check_psd_kernel(xs, 100, cfg, 777);
        CAPTURE(to_string(family));
        CHECK(rep.pass);
        CHECK(rep.min_eig_per_trial.size() == 100);
    }
    // poly base as well
    KernelConfig cfg;
    cfg.family = KernelFamily::svd_matrix;
    cfg.base = BaseKernel::poly;
    CHECK(check_psd_kernel(xs, 100, cfg, 778).pass);
}

TEST_CASE("check_psd_kernel: single diagonal block is PSD for every family") {
    Rng rng(31);
    Mat x = random_matrix(rng, 4, 3);
    for (auto family : {KernelFamily::linear, KernelFamily::hadamard_poly,
                        KernelFamily::gaussian_cols, KernelFamily::svd_matrix}) {
        KernelConfig cfg;
        cfg.family = family;
        cfg.alpha = 0.5;
        cfg.beta = 2;
        Mat k = kernel_eval(cfg, x, x);
        auto [lmin, lmax] = sym_eig_range(0.5 * (k + k.transpose()));
        CHECK(lmin >= -1e-8 * std::max(1.0, lmax));
    }
}

TEST_CASE("closure: nonnegative combinations of PSD kernels stay PSD") {
    Rng rng(32);
    auto xs = random_samples(rng, 5, 4, 3);
    KernelConfig k1;
    k1.family = KernelFamily::linear;
    KernelConfig k2;
    k2.family = KernelFamily::gaussian_cols;
    k2.gamma = 0.4;
    auto composite = [&](const Mat& x, const Mat& y) {
        return Mat(0.7 * kernel_eval(k1, x, y) + 1.3 * kernel_eval(k2, x, y));
    };
    CHECK(check_psd_kernel(xs, 100, composite, 999).pass);
}

TEST_CASE("svd family rejects differing shapes") {
    KernelConfig cfg;
    cfg.family = KernelFamily::svd_matrix;
    CHECK_THROWS_AS(kernel_eval(cfg, Mat::Zero(2, 3), Mat::Zero(3, 3)), std::invalid_argument);
}
