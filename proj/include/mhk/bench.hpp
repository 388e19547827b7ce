#ifndef MHK_BENCH_HPP
#define MHK_BENCH_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhk/core.hpp"
#include "mhk/data.hpp"
#include "mhk/stm.hpp"

namespace mhk {

// ---------------------------------------------------------------------------
// metrics

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;  // binary, positive class +1
    double recall = 0.0;
    double f1 = 0.0;
    double macro_f = 0.0;
    bool binary = false;
};

inline Metrics metrics(const std::vector<int>& pred, const std::vector<int>& truth) {
    require(!truth.empty(), "metrics: empty inputs");
    require(pred.size() == truth.size(), "metrics: length mismatch");
    Metrics m;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (pred[i] == truth[i]) ++correct;
    m.accuracy = double(correct) / double(truth.size());

    std::set<int> classes(truth.begin(), truth.end());
    for (int p : pred) classes.insert(p);
    m.binary = classes.size() <= 2 && classes.count(1) + classes.count(-1) == classes.size();

    auto f1_one_vs_rest = [&](int positive) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (pred[i] == positive && truth[i] == positive) ++tp;
            else if (pred[i] == positive) ++fp;
            else if (truth[i] == positive) ++fn;
        }
        double p = (tp + fp) ? double(tp) / double(tp + fp) : 0.0;
        double r = (tp + fn) ? double(tp) / double(tp + fn) : 0.0;
        double f = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        return std::tuple{p, r, f};
    };

    if (m.binary) {
        auto [p, r, f] = f1_one_vs_rest(+1);
        m.precision = p;
        m.recall = r;
        m.f1 = f;
        m.macro_f = f;
        return m;
    }
    std::set<int> truth_classes(truth.begin(), truth.end());
    double acc = 0.0;
    for (int c : truth_classes) acc += std::get<2>(f1_one_vs_rest(c));
    m.macro_f = acc / double(truth_classes.size());
    return m;
}

// ---------------------------------------------------------------------------
// hyperparameter grid

struct Grid {
    std::vector<double> C_values = {1e-2, 1e-1, 1.0, 1e1, 1e2};
    std::vector<double> sigma_values = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
    std::vector<int> r_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    void validate() const {
        require(!C_values.empty() && !sigma_values.empty() && !r_values.empty(),
                "Grid: empty axis");
        for (double c : C_values) require(c > 0.0, "Grid: C must be > 0");
        for (double s : sigma_values) require(s > 0.0, "Grid: sigma must be > 0");
        for (int r : r_values) require(r >= 1, "Grid: r must be >= 1");
    }
};

/// The grid's sigma axis drives the family's width parameter: sigma for
/// svd_matrix, gamma for gaussian_cols, alpha for hadamard_poly. The linear
/// kernel has no width, the axis collapses to a single point.
inline void apply_grid_sigma(KernelConfig& cfg, double sigma) {
    switch (cfg.family) {
        case KernelFamily::svd_matrix: cfg.sigma = sigma; break;
        case KernelFamily::gaussian_cols: cfg.gamma = sigma; break;
        case KernelFamily::hadamard_poly: cfg.alpha = sigma; break;
        case KernelFamily::linear: break;
    }
}

namespace detail {

inline bool is_binary_labels(const std::vector<int>& y) {
    for (int v : y)
        if (v != 1 && v != -1) return false;
    return true;
}

/// Trains on (xs, ys) and predicts each element of xq. Binary +-1 labels go
/// through train_binary, anything else through one-vs-one.
inline std::vector<int> fit_predict(const std::vector<Mat>& xs, const std::vector<int>& ys,
                                    const std::vector<Mat>& xq, const StmHyper& h,
                                    const BlockGram* gram = nullptr) {
    std::vector<int> out;
    out.reserve(xq.size());
    if (is_binary_labels(ys)) {
        StmModel m = train_binary(xs, ys, h, gram);
        for (const Mat& x : xq) out.push_back(m.predict(x));
    } else {
        OvoModel m = ovo_train(xs, ys, h);
        for (const Mat& x : xq) out.push_back(m.predict(x));
    }
    return out;
}

/// Deterministic stratified fold assignment: per class, shuffled round-robin.
inline std::vector<int> stratified_folds(const std::vector<int>& y, int folds,
                                         std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    std::vector<int> fold(y.size(), 0);
    Rng rng(seed);
    for (auto& [label, idx] : by_class) {
        require(int(idx.size()) >= folds, "grid_search: class "
                + std::to_string(label) + " has fewer samples than folds");
        rng.shuffle(idx);
        for (std::size_t p = 0; p < idx.size(); ++p) fold[idx[p]] = int(p % folds);
    }
    return fold;
}

}  // namespace detail

struct GridPoint {
    double C = 1.0;
    double sigma = 1.0;
    int r = 1;
    double cv_accuracy = 0.0;
};

/// Exhaustive grid scored by stratified k-fold CV accuracy on the training
/// data only. Ties prefer smaller C, then smaller sigma, then smaller r.
inline GridPoint grid_search(const std::vector<Mat>& samples, const std::vector<int>& labels,
                             const Grid& grid, const StmHyper& h_base, int folds,
                             std::uint64_t seed) {
    grid.validate();
    require(folds >= 2, "grid_search: folds must be >= 2");
    std::vector<int> fold = detail::stratified_folds(labels, folds, seed);

    std::vector<double> sigmas = grid.sigma_values;
    std::vector<int> ranks = grid.r_values;
    if (h_base.kernel.family == KernelFamily::linear) sigmas = {h_base.kernel.sigma};
    std::sort(sigmas.begin(), sigmas.end());
    std::sort(ranks.begin(), ranks.end());
    std::vector<double> cs = grid.C_values;
    std::sort(cs.begin(), cs.end());

    // score[(C, sigma, r)] accumulated over folds
    std::map<std::tuple<double, double, int>, std::size_t> hits;
    std::size_t total = 0;
    const bool binary = detail::is_binary_labels(labels);

    for (int f = 0; f < folds; ++f) {
        std::vector<Mat> xs, xq;
        std::vector<int> ys, yq;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (fold[i] == f) { xq.push_back(samples[i]); yq.push_back(labels[i]); }
            else { xs.push_back(samples[i]); ys.push_back(labels[i]); }
        }
        total += yq.size();
        for (double sg : sigmas) {
            StmHyper h = h_base;
            apply_grid_sigma(h.kernel, sg);
            BlockGram gram;
            if (binary) gram = assemble_gram(xs, h.kernel);
            for (double c : cs) {
                for (int r : ranks) {
                    h.C = c;
                    h.r = r;
                    auto pred = detail::fit_predict(xs, ys, xq, h, binary ? &gram : nullptr);
                    std::size_t ok = 0;
                    for (std::size_t i = 0; i < pred.size(); ++i)
                        if (pred[i] == yq[i]) ++ok;
                    hits[{c, sg, r}] += ok;
                }
            }
        }
    }

    GridPoint best;
    bool first = true;
    for (double c : cs)
        for (double sg : sigmas)
            for (int r : ranks) {
                double acc = double(hits[{c, sg, r}]) / double(total);
                if (first || acc > best.cv_accuracy + 0.0) {
                    best = {c, sg, r, acc};
                    first = false;
                }
            }
    return best;
}

// ---------------------------------------------------------------------------
// experiment driver

struct ExperimentConfig {
    std::string dataset_format;   // idx | csv | pgm_dir
    std::string dataset_images;   // idx
    std::string dataset_labels;   // idx
    std::string dataset_path;     // csv | pgm_dir
    std::string dataset_name = "dataset";
    int pgm_label_prefix = 0;     // pgm_dir: leading digits of filename are the class

    std::string task = "binary";  // binary | multiclass
    int positive_class = 0;
    int negative_class = -1;      // -1 = pool all other classes

    SplitSpec split;
    StmHyper hyper;
    Grid grid;
    int folds = 3;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

struct Repetition {
    double accuracy = 0.0;
    double f_measure = 0.0;   // F1 (binary) or macro-F (multiclass)
    GridPoint chosen;
    double seconds_search = 0.0;
    double seconds_fit = 0.0;
    double seconds_eval = 0.0;
};

struct RunReport {
    std::string dataset;
    std::string task;
    KernelFamily kernel = KernelFamily::linear;
    int train_size = 0;
    std::vector<Repetition> reps;
    double mean_accuracy = 0.0, std_accuracy = 0.0;
    double mean_f = 0.0, std_f = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return {mean, std::sqrt(acc / double(v.size() - 1))};
}

}  // namespace detail

/// Table-style "mean(std)" formatting, e.g. 89.3(4.9) for accuracy percent.
inline std::string format_mean_std(double mean, double stdev, bool percent) {
    char buf[64];
    if (percent)
        std::snprintf(buf, sizeof buf, "%.1f(%.1f)", 100.0 * mean, 100.0 * stdev);
    else
        std::snprintf(buf, sizeof buf, "%.3f(%.3f)", mean, stdev);
    return buf;
}

inline Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
    Dataset d;
    if (cfg.dataset_format == "idx") {
        d = load_idx(cfg.dataset_images, cfg.dataset_labels);
    } else if (cfg.dataset_format == "csv") {
        d = load_csv_file(cfg.dataset_path);
    } else if (cfg.dataset_format == "pgm_dir") {
        int ndigits = cfg.pgm_label_prefix > 0 ? cfg.pgm_label_prefix : 2;
        d = load_pgm_dir(cfg.dataset_path, [ndigits](const std::string& fn) {
            require(int(fn.size()) >= ndigits, "pgm label rule: filename too short: " + fn);
            return std::stoi(fn.substr(0, std::size_t(ndigits)));
        });
    } else {
        throw std::invalid_argument("unknown dataset format: " + cfg.dataset_format);
    }
    d.name = cfg.dataset_name;
    return d;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
    Dataset raw = load_experiment_dataset(cfg);
    Dataset data = normalize_unit(raw);

    if (cfg.task == "binary" && cfg.negative_class >= 0) {
        Dataset sub;
        sub.name = data.name;
        for (const auto& s : data.samples)
            if (s.label == cfg.positive_class || s.label == cfg.negative_class)
                sub.samples.push_back(s);
        data = std::move(sub);
    }

    RunReport rep;
    rep.dataset = data.name;
    rep.task = cfg.task;
    rep.kernel = cfg.hyper.kernel.family;

    SplitSpec split = cfg.split;
    if (split.seed == 0) split.seed = cfg.seed;

    for (int r = 0; r < split.repetitions; ++r) {
        auto [train, test] = split_random(data, split, r);
        rep.train_size = int(train.size());

        std::vector<Mat> xs = train.matrices(), xq = test.matrices();
        std::vector<int> ys = train.labels(), yq = test.labels();
        if (cfg.task == "binary") {
            for (auto& v : ys) v = (v == cfg.positive_class) ? +1 : -1;
            for (auto& v : yq) v = (v == cfg.positive_class) ? +1 : -1;
        }

        Repetition out;
        using clock = std::chrono::steady_clock;
        auto t0 = clock::now();
        out.chosen = grid_search(xs, ys, cfg.grid, cfg.hyper, cfg.folds,
                                 cfg.seed ^ std::uint64_t(r) ^ 0x9e3779b97f4a7c15ull);
        auto t1 = clock::now();

        StmHyper h = cfg.hyper;
        h.C = out.chosen.C;
        h.r = out.chosen.r;
        apply_grid_sigma(h.kernel, out.chosen.sigma);
        auto pred = detail::fit_predict(xs, ys, xq, h);
        auto t2 = clock::now();

        Metrics m = metrics(pred, yq);
        out.accuracy = m.accuracy;
        out.f_measure = m.binary ? m.f1 : m.macro_f;
        out.seconds_search = std::chrono::duration<double>(t1 - t0).count();
        out.seconds_fit = std::chrono::duration<double>(t2 - t1).count();
        rep.reps.push_back(out);
    }

    std::vector<double> accs, fs;
    for (const auto& x : rep.reps) {
        accs.push_back(x.accuracy);
        fs.push_back(x.f_measure);
    }
    std::tie(rep.mean_accuracy, rep.std_accuracy) = detail::mean_std(accs);
    std::tie(rep.mean_f, rep.std_f) = detail::mean_std(fs);
    return rep;
}

/// results.csv holds only deterministic fields so a fixed seed reproduces
/// the file byte for byte.
inline void write_results_csv(const RunReport& rep, std::ostream& out) {
    out << "rep,accuracy,f_measure,C,sigma,r,cv_accuracy\n";
    char buf[256];
    for (std::size_t i = 0; i < rep.reps.size(); ++i) {
        const auto& x = rep.reps[i];
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g,%d,%.10g\n",
                      i, x.accuracy, x.f_measure, x.chosen.C, x.chosen.sigma,
                      x.chosen.r, x.chosen.cv_accuracy);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "mean,%.10g,%.10g,,,,\nstd,%.10g,%.10g,,,,\n",
                  rep.mean_accuracy, rep.mean_f, rep.std_accuracy, rep.std_f);
    out << buf;
}

inline nlohmann::json to_json(const RunReport& rep) {
    nlohmann::json j;
    j["dataset"] = rep.dataset;
    j["task"] = rep.task;
    j["kernel"] = to_string(rep.kernel);
    j["train_size"] = rep.train_size;
    j["mean_accuracy"] = rep.mean_accuracy;
    j["std_accuracy"] = rep.std_accuracy;
    j["mean_f"] = rep.mean_f;
    j["std_f"] = rep.std_f;
    j["accuracy"] = format_mean_std(rep.mean_accuracy, rep.std_accuracy, true);
    j["f_measure"] = format_mean_std(rep.mean_f, rep.std_f, false);
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& x : rep.reps) {
        reps.push_back({{"accuracy", x.accuracy}, {"f_measure", x.f_measure},
                        {"C", x.chosen.C}, {"sigma", x.chosen.sigma}, {"r", x.chosen.r},
                        {"cv_accuracy", x.chosen.cv_accuracy},
                        {"seconds_search", x.seconds_search},
                        {"seconds_fit", x.seconds_fit}});
    }
    j["repetitions"] = std::move(reps);
    return j;
}

/// Long-format plot data: one row per (report, metric).
inline void emit_plot_data(const std::vector<RunReport>& reports, std::ostream& out) {
    require(!reports.empty(), "emit_plot_data: no reports");
    out << "kernel,task,dataset,train_size,metric,mean,std\n";
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,accuracy,%.10g,%.10g\n",
                      to_string(r.kernel).c_str(), r.task.c_str(), r.dataset.c_str(),
                      r.train_size, r.mean_accuracy, r.std_accuracy);
        out << buf;
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,f_measure,%.10g,%.10g\n",
                      to_string(r.kernel).c_str(), r.task.c_str(), r.dataset.c_str(),
                      r.train_size, r.mean_f, r.std_f);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// flat key = value config files ('#' comments)

inline std::map<std::string, std::string> parse_flat_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

}  // namespace detail

inline ExperimentConfig experiment_config_from(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    auto get = [&kv](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("dataset.format")) cfg.dataset_format = *v;
    if (auto v = get("dataset.images")) cfg.dataset_images = *v;
    if (auto v = get("dataset.labels")) cfg.dataset_labels = *v;
    if (auto v = get("dataset.path")) cfg.dataset_path = *v;
    if (auto v = get("dataset.name")) cfg.dataset_name = *v;
    if (auto v = get("dataset.pgm_label_prefix")) cfg.pgm_label_prefix = std::stoi(*v);
    if (auto v = get("task")) cfg.task = *v;
    if (auto v = get("binary.positive")) cfg.positive_class = std::stoi(*v);
    if (auto v = get("binary.negative")) cfg.negative_class = std::stoi(*v);
    if (auto v = get("split.train_total")) cfg.split.train_total = std::stoi(*v);
    if (auto v = get("split.train_per_class")) cfg.split.train_per_class = std::stoi(*v);
    if (auto v = get("split.test_total")) cfg.split.test_total = std::stoi(*v);
    if (auto v = get("split.repetitions")) cfg.split.repetitions = std::stoi(*v);
    if (auto v = get("seed")) cfg.seed = std::stoull(*v);
    if (auto v = get("kernel.family")) cfg.hyper.kernel.family = kernel_family_from(*v);
    if (auto v = get("kernel.base"))
        cfg.hyper.kernel.base = (*v == "poly") ? BaseKernel::poly : BaseKernel::rbf;
    if (auto v = get("kernel.alpha")) cfg.hyper.kernel.alpha = std::stod(*v);
    if (auto v = get("kernel.beta")) cfg.hyper.kernel.beta = std::stoi(*v);
    if (auto v = get("kernel.gamma")) cfg.hyper.kernel.gamma = std::stod(*v);
    if (auto v = get("kernel.sigma")) cfg.hyper.kernel.sigma = std::stod(*v);
    if (auto v = get("stm.eps")) cfg.hyper.eps = std::stod(*v);
    if (auto v = get("stm.max_outer")) cfg.hyper.max_outer = std::stoi(*v);
    if (auto v = get("stm.qp_tol")) cfg.hyper.qp_tol = std::stod(*v);
    if (auto v = get("grid.C")) cfg.grid.C_values = detail::parse_double_list(*v);
    if (auto v = get("grid.sigma")) cfg.grid.sigma_values = detail::parse_double_list(*v);
    if (auto v = get("grid.r")) cfg.grid.r_values = detail::parse_int_list(*v);
    if (auto v = get("grid.folds")) cfg.folds = std::stoi(*v);
    if (auto v = get("out_dir")) cfg.out_dir = *v;
    return cfg;
}

/// Runs an experiment and writes results.csv, results.json, plotdata.csv
/// into cfg.out_dir.
inline RunReport run_and_write(const ExperimentConfig& cfg) {
    RunReport rep = run_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/results.csv", std::ios::binary);
        write_results_csv(rep, out);
    }
    {
        std::ofstream out(cfg.out_dir + "/results.json");
        out << to_json(rep).dump(2) << "\n";
    }
    {
        std::ofstream out(cfg.out_dir + "/plotdata.csv", std::ios::binary);
        emit_plot_data({rep}, out);
    }
    return rep;
}

}  // namespace mhk

#endif  // MHK_BENCH_HPP
