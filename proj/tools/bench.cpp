// Experiment driver CLI: `run` executes a config-driven benchmark, `gram`
// dumps a block Gram matrix, `verify` runs the randomized property sweeps.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhk/mhk.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in.good()) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 1;
    }
    auto cfg = mhk::experiment_config_from(mhk::parse_flat_config(in));
    auto rep = mhk::run_and_write(cfg);
    std::cout << "dataset=" << rep.dataset
              << " kernel=" << mhk::to_string(rep.kernel)
              << " reps=" << rep.reps.size() << "\n"
              << "accuracy " << mhk::format_mean_std(rep.mean_accuracy, rep.std_accuracy, true)
              << "  f_measure " << mhk::format_mean_std(rep.mean_f, rep.std_f, false) << "\n"
              << "outputs in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_gram(const std::string& family, const std::string& data_path,
             double alpha, int beta, double gamma, const std::string& base,
             double sigma, const std::string& out_path) {
    mhk::KernelConfig cfg;
    cfg.family = mhk::kernel_family_from(family);
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.gamma = gamma;
    cfg.base = base == "poly" ? mhk::BaseKernel::poly : mhk::BaseKernel::rbf;
    cfg.sigma = sigma;

    auto d = mhk::load_csv_file(data_path);
    auto g = mhk::assemble_gram(d.matrices(), cfg);

    nlohmann::json j;
    j["N"] = g.N;
    j["c"] = g.c;
    j["kernel"] = mhk::to_json(cfg);
    nlohmann::json blocks = nlohmann::json::array();
    for (Eigen::Index i = 0; i < g.N; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index jj = 0; jj < g.N; ++jj) row.push_back(mhk::to_json(g.at(i, jj)));
        blocks.push_back(std::move(row));
    }
    j["blocks"] = std::move(blocks);

    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
        std::cout << "gram written to " << out_path << "\n";
    }
    return 0;
}

bool report(const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    return ok;
}

// randomized property sweeps over the inner products and kernel families
int cmd_verify(std::uint64_t seed) {
    using namespace mhk;
    bool all = true;
    Rng rng(seed);

    {
        bool ok = true;
        for (int t = 0; t < 1000 && ok; ++t) {
            Mat x = random_matrix(rng, 6, 4), y = random_matrix(rng, 6, 4);
            ok = check_cauchy_schwarz(x, y).holds;
            Mat sym_gap = inner_dot(y, x) - inner_dot(x, y).transpose();
            ok = ok && sym_gap.cwiseAbs().maxCoeff() <= 1e-12;
            auto [lmin, lmax] = sym_eig_range(inner_dot(x, x));
            ok = ok && lmin >= -1e-9 * std::max(1.0, lmax);
        }
        all &= report("matspace: Cauchy-Schwarz / symmetry / PSD sweep (1000 pairs)", ok);
    }
    {
        std::vector<Mat> xs;
        for (int i = 0; i < 5; ++i) xs.push_back(random_matrix(rng, 4, 3));
        bool ok = true;
        for (auto family : {KernelFamily::linear, KernelFamily::hadamard_poly,
                            KernelFamily::gaussian_cols, KernelFamily::svd_matrix}) {
            KernelConfig cfg;
            cfg.family = family;
            cfg.alpha = 0.5;
            cfg.beta = 2;
            if (!check_psd_kernel(xs, 100, cfg, seed + 1).pass) {
                ok = false;
                std::cerr << "  PSD sweep failed for " << to_string(family) << "\n";
            }
        }
        all &= report("kernels: PSD sweep, 4 families x 100 trials", ok);
    }
    {
        bool ok = true;
        KernelConfig cfg;
        cfg.family = KernelFamily::svd_matrix;
        cfg.base = BaseKernel::poly;
        for (int t = 0; t < 200 && ok; ++t) {
            Mat x = random_matrix(rng, 4, 3), y = random_matrix(rng, 4, 3);
            Mat gap = kernel_eval(cfg, y, x) - kernel_eval(cfg, x, y).transpose();
            ok = gap.cwiseAbs().maxCoeff() <= 1e-10;
        }
        all &= report("kernels: block-transpose symmetry, 200 pairs", ok);
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix-kernel benchmark driver"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a config-driven experiment");
    run->add_option("--config", config_path, "flat key=value config file")->required();

    std::string family, data_path, base = "rbf", out_path;
    double alpha = 0.0, gamma = 1.0, sigma = 1.0;
    int beta = 1;
    auto* gram = app.add_subcommand("gram", "dump the block Gram of a dataset");
    gram->add_option("--kernel", family, "kernel family")->required();
    gram->add_option("--data", data_path, "dataset in CSV matrix format")->required();
    gram->add_option("--alpha", alpha, "polynomial offset");
    gram->add_option("--beta", beta, "Hadamard exponent");
    gram->add_option("--gamma", gamma, "Gaussian width");
    gram->add_option("--base", base, "svd_matrix base kernel: rbf|poly");
    gram->add_option("--sigma", sigma, "base kernel parameter");
    gram->add_option("--out", out_path, "output file (default stdout)");

    std::uint64_t seed = 2024;
    auto* verify = app.add_subcommand("verify", "run the randomized property suites");
    verify->add_option("--seed", seed, "sweep seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (gram->parsed())
            return cmd_gram(family, data_path, alpha, beta, gamma, base, sigma, out_path);
        if (verify->parsed()) return cmd_verify(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
