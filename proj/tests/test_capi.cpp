// Exercises the shared library through its C interface only.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nopt/nopt.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "nopt_capi_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

const char* kQuad =
    "problem = quadratic\n"
    "problem.spectrum = 1, 0.2\n"
    "problem.n_samples = 32\n"
    "batch_size = 8\n"
    "epochs = 2\n"
    "eval_fraction = 0\n";

} // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(nopt_version()).size() > 0);
    CHECK(std::string(nopt_status_string(NOPT_ERR_DIVERGED)).size() > 0);
    CHECK(std::string(nopt_status_string(NOPT_OK)) != nopt_status_string(NOPT_ERR_CONFIG));
}

TEST_CASE("config errors map to NOPT_ERR_CONFIG with a message") {
    nopt_config* cfg = nullptr;
    CHECK(nopt_config_parse("neuman.alpha = 1\n", &cfg) == NOPT_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(nopt_last_error()).find("neumann.alpha") != std::string::npos);
    CHECK(nopt_config_load("/no/such/file.cfg", &cfg) == NOPT_ERR_CONFIG);
    CHECK(nopt_config_parse(nullptr, &cfg) == NOPT_ERR_INVALID_ARGUMENT);

    REQUIRE(nopt_config_parse(kQuad, &cfg) == NOPT_OK);
    CHECK(nopt_config_set(cfg, "neumann.gamma", "1.5") == NOPT_ERR_CONFIG);
    CHECK(nopt_config_set(cfg, "batch_size", "1000") == NOPT_ERR_CONFIG);
    CHECK(nopt_config_set(cfg, "seed", "7") == NOPT_OK);
    nopt_config_free(cfg);
    nopt_config_free(nullptr);
}

TEST_CASE("train writes outputs and fills the summary") {
    nopt_config* cfg = nullptr;
    REQUIRE(nopt_config_parse(kQuad, &cfg) == NOPT_OK);
    const fs::path dir = fresh_dir("train");
    REQUIRE(nopt_config_set(cfg, "output_dir", dir.c_str()) == NOPT_OK);
    CHECK(std::string(nopt_config_output_dir(cfg)) == dir.string());
    nopt_train_summary s{};
    REQUIRE(nopt_train(cfg, nullptr, &s) == NOPT_OK);
    CHECK(s.total_steps == 8);
    CHECK(s.steps_per_epoch == 4);
    CHECK(s.diverged == 0);
    CHECK(std::isfinite(s.final_train_loss));
    CHECK(fs::exists(dir / "metrics.csv"));

    nopt_checkpoint* ck = nullptr;
    REQUIRE(nopt_checkpoint_read((dir / "final.ckpt").c_str(), &ck) == NOPT_OK);
    CHECK(nopt_checkpoint_size(ck) == 2);
    CHECK(nopt_checkpoint_step(ck) == 8);
    CHECK(std::string(nopt_checkpoint_optimizer(ck)) == "neumann");
    nopt_checkpoint_free(ck);
    nopt_config_free(cfg);
}

TEST_CASE("divergence maps to NOPT_ERR_DIVERGED") {
    nopt_config* cfg = nullptr;
    REQUIRE(nopt_config_parse("problem.spectrum = 10, 1\noptimizer = sgd\nlr.base = 1\nlr.warmup_epochs = 0\n"
                              "problem.n_samples = 8\nbatch_size = 8\neval_fraction = 0\nepochs = 3000\n",
                              &cfg) == NOPT_OK);
    nopt_train_summary s{};
    CHECK(nopt_train(cfg, fresh_dir("diverge").c_str(), &s) == NOPT_ERR_DIVERGED);
    CHECK(s.diverged == 1);
    nopt_config_free(cfg);
}

TEST_CASE("checkpoint round trip and format errors") {
    const fs::path dir = fresh_dir("ckpt");
    const std::vector<double> v{1.5, -2.25, 1e-300};
    const std::string path = (dir / "x.ckpt").string();
    REQUIRE(nopt_checkpoint_write(path.c_str(), v.data(), v.size(), "adam", 42) == NOPT_OK);
    nopt_checkpoint* ck = nullptr;
    REQUIRE(nopt_checkpoint_read(path.c_str(), &ck) == NOPT_OK);
    REQUIRE(nopt_checkpoint_size(ck) == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(nopt_checkpoint_values(ck)[i] == v[i]);
    CHECK(nopt_checkpoint_step(ck) == 42);
    nopt_checkpoint_free(ck);

    std::ofstream(dir / "junk.ckpt") << "definitely not a checkpoint";
    CHECK(nopt_checkpoint_read((dir / "junk.ckpt").c_str(), &ck) == NOPT_ERR_FORMAT);
    CHECK(std::string(nopt_last_error()) == "not a checkpoint file");
    CHECK(nopt_checkpoint_read((dir / "none.ckpt").c_str(), &ck) == NOPT_ERR_IO);
}

TEST_CASE("compare, eigenprobe, gradcheck") {
    nopt_config* a = nullptr;
    nopt_config* b = nullptr;
    REQUIRE(nopt_config_parse(kQuad, &a) == NOPT_OK);
    REQUIRE(nopt_config_parse(kQuad, &b) == NOPT_OK);
    REQUIRE(nopt_config_set(b, "optimizer", "sgd") == NOPT_OK);
    const nopt_config* both[] = {a, b};
    const fs::path dir = fresh_dir("compare");
    CHECK(nopt_compare(both, 2, dir.c_str()) == NOPT_OK);
    CHECK(fs::exists(dir / "compare.csv"));
    CHECK(nopt_compare(both, 0, dir.c_str()) != NOPT_OK);

    REQUIRE(nopt_config_set(a, "checkpoint_every_epochs", "1") == NOPT_OK);
    const fs::path run = fresh_dir("probe_run");
    nopt_train_summary s{};
    REQUIRE(nopt_train(a, run.c_str(), &s) == NOPT_OK);
    std::size_t n = 0;
    CHECK(nopt_eigenprobe(a, (run / "checkpoints" / "*.ckpt").c_str(), 0, run.c_str(), &n) == NOPT_OK);
    CHECK(n == 3);

    nopt_gradcheck_summary g{};
    CHECK(nopt_gradcheck(a, &g) == NOPT_OK);
    CHECK(g.passed == 1);
    CHECK(g.points == 10);
    CHECK(g.max_grad_rel_error <= g.grad_tol);
    nopt_config_free(a);
    nopt_config_free(b);
}
