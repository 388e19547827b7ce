// Deterministic synthetic fixtures shared by the test binaries.
#ifndef MHK_TESTS_FIXTURES_HPP
#define MHK_TESTS_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "mhk/core.hpp"
#include "mhk/data.hpp"

namespace mhk::fixtures {

// Column-vector samples (d x 1 matrices) from two Gaussian-ish blobs at
// +-center. margin > 0 keeps the blobs separated; margin < 0 makes them
// overlap.
inline void two_blobs(int per_class, int dim, double center, double spread,
                      std::uint64_t seed, std::vector<Mat>& xs, std::vector<int>& ys) {
    Rng rng(seed);
    for (int cls = 0; cls < 2; ++cls) {
        double mu = cls == 0 ? center : -center;
        for (int i = 0; i < per_class; ++i) {
            Mat x(dim, 1);
            for (int d = 0; d < dim; ++d)
                x(d, 0) = mu + rng.uniform(-spread, spread);
            xs.push_back(x);
            ys.push_back(cls == 0 ? +1 : -1);
        }
    }
}

// Linearly separable 3x3-matrix classes: class +1 concentrates energy on the
// diagonal, class -1 on the anti-diagonal. Separable with a comfortable
// margin for every kernel family.
inline void separable_matrices(int per_class, std::uint64_t seed,
                               std::vector<Mat>& xs, std::vector<int>& ys) {
    Rng rng(seed);
    Mat base_pos = Mat::Identity(3, 3);
    Mat base_neg = Mat::Zero(3, 3);
    base_neg(0, 2) = base_neg(1, 1) = base_neg(2, 0) = 1.0;
    for (int cls = 0; cls < 2; ++cls) {
        const Mat& base = cls == 0 ? base_pos : base_neg;
        for (int i = 0; i < per_class; ++i) {
            Mat noise = random_matrix(rng, 3, 3, -0.1, 0.1);
            xs.push_back(2.0 * base + noise);
            ys.push_back(cls == 0 ? +1 : -1);
        }
    }
}

// Three separable classes of 3x3 matrices for the one-vs-one tests.
inline void three_class_matrices(int per_class, std::uint64_t seed,
                                 std::vector<Mat>& xs, std::vector<int>& ys) {
    Rng rng(seed);
    std::vector<Mat> bases(3, Mat::Zero(3, 3));
    bases[0] = Mat::Identity(3, 3);
    bases[1](0, 2) = bases[1](1, 1) = bases[1](2, 0) = 1.0;
    bases[2].row(0).setOnes();
    for (int cls = 0; cls < 3; ++cls)
        for (int i = 0; i < per_class; ++i) {
            Mat noise = random_matrix(rng, 3, 3, -0.1, 0.1);
            xs.push_back(2.0 * bases[cls] + noise);
            ys.push_back(cls);
        }
}

// Synthetic 28x28 digit images: class 0 draws an ellipse ring, class 1 a
// near-vertical stroke, both with jittered geometry and additive pixel
// noise. Stands in for handwritten-digit data where no real corpus is
// available; the two shapes are easy to separate, as intended for sanity
// benchmarks.
inline Dataset synth_digits(int n_zeros, int n_ones, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.name = "synth_digits";
    auto emit = [&](int label) {
        Mat img = Mat::Zero(28, 28);
        double cx = 13.5 + rng.uniform(-2.0, 2.0);
        double cy = 13.5 + rng.uniform(-2.0, 2.0);
        if (label == 0) {
            double rx = rng.uniform(5.5, 8.5);
            double ry = rng.uniform(7.0, 10.0);
            double sharp = rng.uniform(3.0, 5.0);
            for (int i = 0; i < 28; ++i)
                for (int j = 0; j < 28; ++j) {
                    double dx = (j - cx) / rx, dy = (i - cy) / ry;
                    double v = std::sqrt(dx * dx + dy * dy) - 1.0;
                    img(i, j) = 255.0 * std::exp(-(v * sharp) * (v * sharp));
                }
        } else {
            double slant = rng.uniform(-0.15, 0.15);
            double half = rng.uniform(7.0, 10.0);
            double th = rng.uniform(1.2, 2.2);
            for (int i = 0; i < 28; ++i)
                for (int j = 0; j < 28; ++j) {
                    double dy = i - cy;
                    if (std::abs(dy) > half) continue;
                    double dist = (j - (cx + slant * dy)) / th;
                    img(i, j) = 255.0 * std::exp(-dist * dist);
                }
        }
        for (int i = 0; i < 28; ++i)
            for (int j = 0; j < 28; ++j) {
                double v = img(i, j) + rng.uniform(-16.0, 16.0);
                img(i, j) = std::floor(std::clamp(v, 0.0, 255.0));
            }
        d.samples.push_back({img, label});
    };
    // interleave so splits stay balanced under any prefix
    int z = 0, o = 0;
    while (z < n_zeros || o < n_ones) {
        if (z < n_zeros) { emit(0); ++z; }
        if (o < n_ones) { emit(1); ++o; }
    }
    return d;
}

}  // namespace mhk::fixtures

#endif  // MHK_TESTS_FIXTURES_HPP
