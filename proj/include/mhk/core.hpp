#ifndef MHK_CORE_HPP
#define MHK_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline bool is_finite(const Mat& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void require_same_shape(const Mat& x, const Mat& y, const char* where) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument(std::string(where) + ": shape mismatch ("
            + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " vs "
            + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ")");
}

/// Portable deterministic randomness. mt19937_64's raw output sequence is
/// fixed by the standard; the mappings below avoid the
/// implementation-defined std::*_distribution classes so that seeds
/// reproduce bit-identical draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double next_double() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // uniform integer in [0, n), rejection sampled
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_below: n == 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[next_below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

inline Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                         double lo = -1.0, double hi = 1.0) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = rng.uniform(lo, hi);
    return m;
}

}  // namespace mhk

#endif  // MHK_CORE_HPP
