// Command-line front end. Talks to the library only through the C API.
//
//   nopt train <config>
//   nopt compare <config> <config>...
//   nopt eigenprobe <config> --checkpoints <glob> [--k <int>]
//   nopt gradcheck <config>
//
// Exit status: 0 success, 2 configuration error, 3 divergence, 1 otherwise.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nopt/nopt.h"

namespace {

struct ConfigDeleter {
    void operator()(nopt_config* c) const { nopt_config_free(c); }
};
using ConfigPtr = std::unique_ptr<nopt_config, ConfigDeleter>;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool deterministic = false;
};

int exit_code(nopt_status s) {
    switch (s) {
    case NOPT_OK: return 0;
    case NOPT_ERR_CONFIG: return 2;
    case NOPT_ERR_DIVERGED: return 3;
    default: return 1;
    }
}

int report(nopt_status s, const std::string& what) {
    if (s != NOPT_OK) std::cerr << "nopt " << what << ": " << nopt_status_string(s) << ": " << nopt_last_error() << '\n';
    return exit_code(s);
}

nopt_status load(const std::string& path, const Overrides& o, ConfigPtr& out) {
    nopt_config* raw = nullptr;
    nopt_status s = nopt_config_load(path.c_str(), &raw);
    if (s != NOPT_OK) return s;
    out.reset(raw);
    if (o.seed) {
        s = nopt_config_set(raw, "seed", std::to_string(*o.seed).c_str());
        if (s != NOPT_OK) return s;
    }
    if (!o.out_dir.empty()) {
        s = nopt_config_set(raw, "output_dir", o.out_dir.c_str());
        if (s != NOPT_OK) return s;
    }
    if (o.deterministic) s = nopt_config_set(raw, "deterministic", "true");
    return s;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Override the config's seed");
    cmd->add_option("--out-dir", o.out_dir, "Override the output directory");
    cmd->add_flag("--deterministic", o.deterministic, "Force deterministic mode");
}

int cmd_train(const std::string& path, const Overrides& o) {
    ConfigPtr cfg;
    if (auto s = load(path, o, cfg); s != NOPT_OK) return report(s, "train");
    nopt_train_summary sum{};
    const nopt_status s = nopt_train(cfg.get(), nullptr, &sum);
    if (s == NOPT_OK) {
        std::printf("steps=%lld steps_per_epoch=%zu train_loss=%.10g train_acc=%.4f eval_loss=%.10g eval_acc=%.4f\n",
                    static_cast<long long>(sum.total_steps), sum.steps_per_epoch, sum.final_train_loss,
                    sum.final_train_acc, sum.final_eval_loss, sum.final_eval_acc);
        std::printf("outputs in %s\n", nopt_config_output_dir(cfg.get()));
    }
    return report(s, "train");
}

int cmd_compare(const std::vector<std::string>& paths, const Overrides& o) {
    std::vector<ConfigPtr> cfgs;
    std::vector<const nopt_config*> raw;
    for (const auto& p : paths) {
        ConfigPtr c;
        if (auto s = load(p, o, c); s != NOPT_OK) return report(s, "compare");
        raw.push_back(c.get());
        cfgs.push_back(std::move(c));
    }
    const nopt_status s = nopt_compare(raw.data(), raw.size(), nullptr);
    if (s == NOPT_OK) {
        const std::string dir = nopt_config_output_dir(cfgs.front().get());
        std::ifstream in(dir + "/compare_summary.csv");
        std::cout << in.rdbuf();
        std::printf("outputs in %s\n", dir.c_str());
    }
    return report(s, "compare");
}

int cmd_eigenprobe(const std::string& path, const std::string& pattern, std::size_t k, const Overrides& o) {
    ConfigPtr cfg;
    if (auto s = load(path, o, cfg); s != NOPT_OK) return report(s, "eigenprobe");
    std::size_t n = 0;
    const nopt_status s = nopt_eigenprobe(cfg.get(), pattern.c_str(), k, nullptr, &n);
    if (s == NOPT_OK) std::printf("probed %zu checkpoint(s); wrote %s/eigenprobe.csv\n", n, nopt_config_output_dir(cfg.get()));
    return report(s, "eigenprobe");
}

int cmd_gradcheck(const std::string& path, const Overrides& o) {
    ConfigPtr cfg;
    if (auto s = load(path, o, cfg); s != NOPT_OK) return report(s, "gradcheck");
    nopt_gradcheck_summary sum{};
    const nopt_status s = nopt_gradcheck(cfg.get(), &sum);
    if (s == NOPT_OK || s == NOPT_ERR_CHECK_FAILED) {
        std::printf("points=%zu\n", sum.points);
        std::printf("gradient      max rel error %.3e (tol %.0e)\n", sum.max_grad_rel_error, sum.grad_tol);
        std::printf("hvp           max rel error %.3e (tol %.0e)\n", sum.max_hvp_rel_error, sum.hvp_tol);
        std::printf("curvature     max rel error %.3e (tol %.0e)\n", sum.max_curvature_rel_error, sum.hvp_tol);
        std::printf("symmetry      max error     %.3e (tol %.0e)\n", sum.max_symmetry_error, sum.hvp_tol);
        std::printf("%s\n", sum.passed ? "PASS" : "FAIL");
    }
    return report(s, "gradcheck");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neumann optimizer experiments"};
    app.require_subcommand(1);
    Overrides o;

    std::string train_cfg;
    auto* train = app.add_subcommand("train", "Train one configuration");
    train->add_option("config", train_cfg)->required();
    add_common(train, o);

    std::vector<std::string> compare_cfgs;
    auto* compare = app.add_subcommand("compare", "Train several configurations on the same problem");
    compare->add_option("configs", compare_cfgs)->required();
    add_common(compare, o);

    std::string probe_cfg;
    std::string pattern;
    std::size_t k = 0;
    auto* probe = app.add_subcommand("eigenprobe", "Lanczos extremal-eigenvalue probe over checkpoints");
    probe->add_option("config", probe_cfg)->required();
    probe->add_option("--checkpoints", pattern, "Glob of checkpoint files")->required();
    probe->add_option("--k", k, "Lanczos steps (default: probe.k, 10)");
    add_common(probe, o);

    std::string grad_cfg;
    auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient and HVP checks");
    grad->add_option("config", grad_cfg)->required();
    add_common(grad, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*train) return cmd_train(train_cfg, o);
    if (*compare) return cmd_compare(compare_cfgs, o);
    if (*probe) return cmd_eigenprobe(probe_cfg, pattern, k, o);
    return cmd_gradcheck(grad_cfg, o);
}
