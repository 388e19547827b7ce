#ifndef MHK_STM_HPP
#define MHK_STM_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include <json.hpp>

#include "mhk/core.hpp"
#include "mhk/kernels.hpp"
#include "mhk/qp.hpp"

namespace mhk {

struct StmHyper {
    int r = 1;               // rank-1 term count
    double C = 1.0;
    double eps = 1e-3;       // stopping threshold on ||d alpha||, ||d beta||
    int max_outer = 20;
    double qp_tol = 1e-3;
    int qp_max_passes = 1000;
    KernelConfig kernel;

    void validate() const {
        require(r >= 1, "StmHyper: r must be >= 1");
        require(C > 0.0, "StmHyper: C must be > 0");
        require(eps > 0.0, "StmHyper: eps must be > 0");
        require(max_outer >= 1, "StmHyper: max_outer must be >= 1");
        kernel.validate();
    }
};

/// Deterministic initialization: v_k = e_{((k-1) mod c) + 1}.
inline std::vector<Vec> init_v(int r, Eigen::Index c) {
    std::vector<Vec> v(r);
    for (int k = 0; k < r; ++k) {
        v[k] = Vec::Zero(c);
        v[k](k % c) = 1.0;
    }
    return v;
}

/// u-step Gram: entry (i,j) = y_i y_j sum_k v_k^T K(X_i,X_j) v_k / (v_k^T v_k).
inline Mat u_step_gram(const BlockGram& g, const std::vector<int>& y,
                       const std::vector<Vec>& v) {
    const Eigen::Index n = g.N;
    require(static_cast<Eigen::Index>(y.size()) == n, "u_step_gram: label count mismatch");
    for (const Vec& vk : v) {
        require(vk.size() == g.c, "u_step_gram: v_k length must equal block size");
        require(vk.squaredNorm() > 1e-12, "u_step_gram: degenerate v_k");
    }
    Mat q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            double acc = 0.0;
            for (const Vec& vk : v)
                acc += vk.dot(g.at(i, j) * vk) / vk.squaredNorm();
            q(i, j) = y[i] * y[j] * acc;
            q(j, i) = q(i, j);
        }
    return q;
}

/// Kernel-expanded u_k rows: rho_k(i) = u_k^T Phi(X_i) as a length-c row,
/// together with u_norms[k] = u_k^T u_k.
struct FeatureRows {
    std::vector<Mat> rho;  // r matrices, each N x c; row i is rho_k(i)
    Vec u_norms;           // length r
    bool alpha_zero = false;
};

inline FeatureRows feature_rows(const BlockGram& g, const std::vector<int>& y,
                                const Vec& alpha, const std::vector<Vec>& v) {
    const Eigen::Index n = g.N;
    const int r = static_cast<int>(v.size());
    FeatureRows fr;
    fr.rho.resize(r);
    fr.u_norms = Vec::Zero(r);
    fr.alpha_zero = alpha.isZero(0.0);
    for (int k = 0; k < r; ++k) {
        const Vec& vk = v[k];
        require(vk.squaredNorm() > 1e-12, "feature_rows: degenerate v_k");
        const double vv = vk.squaredNorm();
        Mat rho = Mat::Zero(n, g.c);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (alpha(j) == 0.0) continue;
                // v_k^T K(X_j, X_i) as a row of length c
                rho.row(i) += (alpha(j) * y[j] / vv) * (vk.transpose() * g.at(j, i));
            }
        double un = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (alpha(i) == 0.0) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (alpha(j) == 0.0) continue;
                un += alpha(i) * alpha(j) * y[i] * y[j] * vk.dot(g.at(i, j) * vk);
            }
        }
        fr.u_norms(k) = un / (vv * vv);
        fr.rho[k] = std::move(rho);
    }
    return fr;
}

/// v-step Gram: entry (i,j) = y_i y_j sum_k rho_k(i) . rho_k(j) / u_norms[k],
/// skipping terms with vanishing u_k.
inline Mat v_step_gram(const FeatureRows& fr, const std::vector<int>& y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    int kept = 0;
    Mat q = Mat::Zero(n, n);
    for (std::size_t k = 0; k < fr.rho.size(); ++k) {
        if (fr.u_norms(static_cast<Eigen::Index>(k)) <= 1e-12) continue;
        ++kept;
        q += fr.rho[k] * fr.rho[k].transpose() / fr.u_norms(static_cast<Eigen::Index>(k));
    }
    require(kept > 0, "v_step_gram: all rank-1 terms degenerate");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            q(i, j) *= y[i] * y[j];
    return q;
}

/// v_k = sum_i beta_i y_i rho_k(i)^T / u_norms[k]. Degenerate results are
/// reset to the deterministic initialization.
inline std::vector<Vec> update_v(const FeatureRows& fr, const Vec& beta,
                                 const std::vector<int>& y,
                                 const std::vector<Vec>& v_old) {
    const int r = static_cast<int>(fr.rho.size());
    const Eigen::Index c = v_old.empty() ? 0 : v_old[0].size();
    std::vector<Vec> v_new(r);
    for (int k = 0; k < r; ++k) {
        if (fr.u_norms(k) <= 1e-12) {  // term dropped in the v-step
            v_new[k] = v_old[k];
            continue;
        }
        Vec vk = Vec::Zero(fr.rho[k].cols());
        for (Eigen::Index i = 0; i < fr.rho[k].rows(); ++i)
            vk += (beta(i) * y[i] / fr.u_norms(k)) * fr.rho[k].row(i).transpose();
        if (vk.squaredNorm() <= 1e-12) {
            Vec e = Vec::Zero(c);
            e(k % c) = 1.0;
            vk = e;
        }
        v_new[k] = std::move(vk);
    }
    return v_new;
}

struct StmModel {
    KernelConfig kernel;
    std::vector<Mat> train_refs;
    std::vector<int> y;       // +-1
    Vec alpha;                // final u-step coefficients
    std::vector<Vec> v;       // v in effect during the final u-step
    double b = 0.0;
    int outer_iterations = 0;
    bool converged = false;

    /// Prediction-time feature cache for the svd_matrix family.
    void warm_cache() const {
        if (kernel.family == KernelFamily::svd_matrix && feats_.empty()) {
            feats_.reserve(train_refs.size());
            for (const Mat& s : train_refs) feats_.push_back(svd_features(s));
        }
    }

    double decision_value(const Mat& x) const {
        require(!train_refs.empty(), "decision_value: empty model");
        require_same_shape(train_refs[0], x, "decision_value");
        warm_cache();
        SvdFeatures fx;
        if (kernel.family == KernelFamily::svd_matrix) fx = svd_features(x);
        double f = b;
        const auto n = static_cast<Eigen::Index>(train_refs.size());
        for (Eigen::Index j = 0; j < n; ++j) {
            if (alpha(j) == 0.0) continue;
            Mat kj = (kernel.family == KernelFamily::svd_matrix)
                ? kernel_svd_from_features(feats_[j], fx, kernel.base, kernel.sigma)
                : kernel_eval(kernel, train_refs[j], x);
            double acc = 0.0;
            for (const Vec& vk : v)
                acc += vk.dot(kj * vk) / vk.squaredNorm();
            f += alpha(j) * y[j] * acc;
        }
        return f;
    }

    /// Sign classification; an exact zero goes to +1.
    int predict(const Mat& x) const { return decision_value(x) >= 0.0 ? 1 : -1; }

private:
    mutable std::vector<SvdFeatures> feats_;
};

/// Alternating trainer: fix v, solve the u-step dual for alpha; expand u via
/// the kernel trick; solve the v-step dual for beta; update v. Stops when
/// both ||d alpha|| and ||d beta|| fall below eps, or at max_outer.
inline StmModel train_binary(const std::vector<Mat>& samples,
                             const std::vector<int>& labels, const StmHyper& h,
                             const BlockGram* precomputed_gram = nullptr) {
    h.validate();
    require(samples.size() == labels.size(), "train_binary: sample/label count mismatch");
    require(samples.size() >= 2, "train_binary: need >= 2 samples");
    {
        bool pos = false, neg = false;
        for (int yi : labels) {
            require(yi == 1 || yi == -1, "train_binary: labels must be +-1");
            (yi == 1 ? pos : neg) = true;
        }
        require(pos && neg, "train_binary: both classes required");
    }

    BlockGram g = precomputed_gram ? *precomputed_gram : assemble_gram(samples, h.kernel);
    std::vector<Vec> v = init_v(h.r, g.c);

    StmModel m;
    m.kernel = h.kernel;
    m.train_refs = samples;
    m.y = labels;

    const auto n = static_cast<Eigen::Index>(samples.size());
    Vec alpha_old = Vec::Zero(n), beta_old = Vec::Zero(n);
    for (int outer = 1; outer <= h.max_outer; ++outer) {
        std::vector<Vec> v_at_u = v;

        DualProblem up{u_step_gram(g, labels, v), labels, h.C, h.qp_tol};
        DualSolution us = solve_dual(up, h.qp_max_passes);

        m.alpha = us.alpha;
        m.v = std::move(v_at_u);
        m.b = us.b;
        m.outer_iterations = outer;

        FeatureRows fr = feature_rows(g, labels, us.alpha, v);
        Vec beta_new = beta_old;
        double dv = 0.0;
        if (!fr.alpha_zero && (fr.u_norms.array() > 1e-12).any()) {
            DualProblem vp{v_step_gram(fr, labels), labels, h.C, h.qp_tol};
            DualSolution vs = solve_dual(vp, h.qp_max_passes);
            beta_new = vs.alpha;
            std::vector<Vec> v_new = update_v(fr, beta_new, labels, v);
            for (std::size_t k = 0; k < v.size(); ++k)
                dv = std::max(dv, (v_new[k] - v[k]).norm()
                                      / std::max(1.0, v[k].norm()));
            v = std::move(v_new);
        }

        double da = (us.alpha - alpha_old).norm();
        double db = (beta_new - beta_old).norm();
        alpha_old = us.alpha;
        beta_old = beta_new;
        // the v-step dual is rank-deficient (rank <= r*c), so beta can hop
        // between optimal vertices even at a fixed point; its primal image,
        // the updated v, is unique and serves as an equivalent measure
        if (da < h.eps && (db < h.eps || dv < h.eps)) {
            m.converged = true;
            break;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// one-vs-one multiclass

struct OvoModel {
    std::vector<int> classes;                 // ascending
    std::vector<std::pair<int, int>> pairs;   // (class_a, class_b), a < b
    std::vector<StmModel> machines;           // one per pair

    int predict(const Mat& x) const {
        std::map<int, int> votes;
        std::map<int, double> magnitude;
        for (int c : classes) { votes[c] = 0; magnitude[c] = 0.0; }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            double f = machines[p].decision_value(x);
            int winner = f >= 0.0 ? pairs[p].first : pairs[p].second;
            votes[winner] += 1;
            magnitude[winner] += std::abs(f);
        }
        int best = classes.front();
        for (int c : classes) {
            if (votes[c] > votes[best]) best = c;
            else if (votes[c] == votes[best] && magnitude[c] > magnitude[best]) best = c;
            // remaining ties keep the lower class (ascending iteration order)
        }
        return best;
    }
};

inline OvoModel ovo_train(const std::vector<Mat>& samples,
                          const std::vector<int>& labels, const StmHyper& h) {
    require(samples.size() == labels.size(), "ovo_train: sample/label count mismatch");
    std::set<int> cls(labels.begin(), labels.end());
    require(cls.size() >= 2, "ovo_train: need >= 2 classes");
    OvoModel m;
    m.classes.assign(cls.begin(), cls.end());
    for (std::size_t a = 0; a < m.classes.size(); ++a)
        for (std::size_t b = a + 1; b < m.classes.size(); ++b) {
            int ca = m.classes[a], cb = m.classes[b];
            std::vector<Mat> sub;
            std::vector<int> suby;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (labels[i] == ca) { sub.push_back(samples[i]); suby.push_back(+1); }
                else if (labels[i] == cb) { sub.push_back(samples[i]); suby.push_back(-1); }
            }
            m.pairs.emplace_back(ca, cb);
            m.machines.push_back(train_binary(sub, suby, h));
        }
    return m;
}

// ---------------------------------------------------------------------------
// model serialization (versioned JSON; round-trip preserves predictions)

inline nlohmann::json to_json(const KernelConfig& cfg) {
    return {{"family", to_string(cfg.family)}, {"alpha", cfg.alpha},
            {"beta", cfg.beta}, {"gamma", cfg.gamma},
            {"base", cfg.base == BaseKernel::rbf ? "rbf" : "poly"},
            {"sigma", cfg.sigma}};
}

inline KernelConfig kernel_config_from_json(const nlohmann::json& j) {
    KernelConfig cfg;
    cfg.family = kernel_family_from(j.at("family").get<std::string>());
    cfg.alpha = j.at("alpha").get<double>();
    cfg.beta = j.at("beta").get<int>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.base = j.at("base").get<std::string>() == "poly" ? BaseKernel::poly : BaseKernel::rbf;
    cfg.sigma = j.at("sigma").get<double>();
    return cfg;
}

inline nlohmann::json to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const nlohmann::json& j) {
    auto rows = static_cast<Eigen::Index>(j.size());
    require(rows > 0, "mat_from_json: empty matrix");
    auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index jj = 0; jj < cols; ++jj)
            m(i, jj) = j.at(i).at(jj).get<double>();
    return m;
}

inline nlohmann::json to_json(const StmModel& m) {
    nlohmann::json j;
    j["format"] = "mhk-stm-model";
    j["version"] = 1;
    j["kernel"] = to_json(m.kernel);
    j["b"] = m.b;
    j["alpha"] = std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size());
    j["y"] = m.y;
    nlohmann::json vs = nlohmann::json::array();
    for (const Vec& vk : m.v)
        vs.push_back(std::vector<double>(vk.data(), vk.data() + vk.size()));
    j["v"] = std::move(vs);
    nlohmann::json refs = nlohmann::json::array();
    for (const Mat& x : m.train_refs) refs.push_back(to_json(x));
    j["train_refs"] = std::move(refs);
    return j;
}

inline StmModel stm_model_from_json(const nlohmann::json& j) {
    require(j.at("format") == "mhk-stm-model", "stm_model_from_json: wrong format tag");
    require(j.at("version").get<int>() == 1, "stm_model_from_json: unsupported version");
    StmModel m;
    m.kernel = kernel_config_from_json(j.at("kernel"));
    m.b = j.at("b").get<double>();
    auto av = j.at("alpha").get<std::vector<double>>();
    m.alpha = Eigen::Map<const Vec>(av.data(), static_cast<Eigen::Index>(av.size()));
    m.y = j.at("y").get<std::vector<int>>();
    for (const auto& vk : j.at("v")) {
        auto vv = vk.get<std::vector<double>>();
        m.v.push_back(Eigen::Map<const Vec>(vv.data(), static_cast<Eigen::Index>(vv.size())));
    }
    for (const auto& x : j.at("train_refs")) m.train_refs.push_back(mat_from_json(x));
    return m;
}

}  // namespace mhk

#endif  // MHK_STM_HPP
