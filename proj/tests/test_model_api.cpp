#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "doctest.h"
#include "nopt/dataset.hpp"
#include "nopt/dense.hpp"
#include "nopt/errors.hpp"
#include "nopt/finite_diff.hpp"
#include "nopt/harness.hpp"
#include "nopt/lanczos.hpp"
#include "nopt/model.hpp"
#include "nopt/problems.hpp"
#include "oracles.hpp"

using namespace nopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "nopt_model_api_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("sampler: B = N yields the full dataset") {
    MiniBatchSampler s(std::vector<std::size_t>{0, 1, 2, 3, 4}, 5, RngStream(1));
    auto b = s.next();
    std::sort(b.indices.begin(), b.indices.end());
    CHECK(b.indices == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("sampler: singleton batches repeat under a fixed seed") {
    std::vector<std::size_t> pool(20);
    std::iota(pool.begin(), pool.end(), 0);
    MiniBatchSampler a(pool, 1, RngStream(9)), b(pool, 1, RngStream(9));
    for (int i = 0; i < 50; ++i) {
        const auto x = a.next(), y = b.next();
        REQUIRE(x.size() == 1);
        CHECK(x.indices == y.indices);
    }
}

TEST_CASE("sampler: N = 10, B = 3 consumes the seeded permutation and drops the tail") {
    std::vector<std::size_t> pool(10);
    std::iota(pool.begin(), pool.end(), 0);
    // The permutation the sampler is documented to use: a Fisher-Yates shuffle
    // driven by the same stream.
    std::vector<std::size_t> perm = pool;
    RngStream replay(123);
    replay.shuffle(perm);

    MiniBatchSampler s(pool, 3, RngStream(123));
    CHECK(s.batches_per_epoch() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto b = s.next();
        CHECK(b.indices == std::vector<std::size_t>(perm.begin() + 3 * k, perm.begin() + 3 * k + 3));
    }
    CHECK(s.epoch() == 0);
    s.next();  // first batch of the reshuffled second epoch
    CHECK(s.epoch() == 1);
}

TEST_CASE("sampler: every index appears exactly once per epoch") {
    std::vector<std::size_t> pool(24);
    std::iota(pool.begin(), pool.end(), 100);
    MiniBatchSampler s(pool, 6, RngStream(3));
    for (int epoch = 0; epoch < 3; ++epoch) {
        std::multiset<std::size_t> seen;
        for (int k = 0; k < 4; ++k)
            for (auto i : s.next().indices) seen.insert(i);
        CHECK(seen == std::multiset<std::size_t>(pool.begin(), pool.end()));
    }
}

TEST_CASE("sampler: B > N is rejected") {
    CHECK_THROWS_AS(MiniBatchSampler(std::vector<std::size_t>{0, 1}, 3, RngStream(0)), InvalidArgument);
    CHECK_THROWS_AS(MiniBatchSampler(std::vector<std::size_t>{0, 1}, 0, RngStream(0)), InvalidArgument);
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS(Dataset({}, TaskKind::regression));
    CHECK_THROWS(Dataset({Sample{Vector{1, 2}, 0}, Sample{Vector{1}, 1}}, TaskKind::regression));
    CHECK_THROWS(Dataset({Sample{Vector{1}, 0.5}}, TaskKind::classification));
}

TEST_CASE("load_csv") {
    const auto ok = load_csv(write_file("ok.csv", "x1,x2,y\n0.5,-1,1\n2e-3,4,0\n"));
    CHECK(ok->size() == 2);
    CHECK(ok->feature_dim() == 2);
    CHECK(ok->kind() == TaskKind::classification);
    CHECK((*ok)[1].features == Vector{2e-3, 4});

    const auto reg = load_csv(write_file("reg.csv", "a,y\n1,2.5\n"));
    CHECK(reg->kind() == TaskKind::regression);

    CHECK(error_of([] { load_csv(write_file("empty.csv", "x1,x2,y\n")); }).find("empty dataset") != std::string::npos);
    const auto ragged = error_of([] { load_csv(write_file("ragged.csv", "x1,x2,y\n1,2,0\n1,2,3,0\n")); });
    CHECK(ragged.find("row 2") != std::string::npos);
    const auto text = error_of([] { load_csv(write_file("text.csv", "x1,y\nabc,1\n")); });
    CHECK(text.find("row 1") != std::string::npos);
    CHECK_THROWS_AS(load_csv(scratch("does_not_exist.csv")), IoError);
}

TEST_CASE("quadratic problem: analytic gradient and minimizer") {
    const Vector spec{1, 0.1}, ws{0.5, -2};
    const auto p = make_quadratic_problem(spec, ws, 0.0, 16, 1);
    const MiniBatch all = full_batch(16);
    const Vector w{3, 1};
    CHECK(p.model->gradient(w, all) == Vector{2.5, 0.1 * 3});
    CHECK(p.model->loss(ws, batch_of({0, 3, 5})) == 0.0);
    CHECK(p.model->gradient(ws, batch_of({2})) == Vector{0, 0});
    CHECK(p.model->hvp(w, batch_of({7}), Vector{1, 1}) == Vector{1, 0.1});
}

TEST_CASE("quadratic problem: noise cancels exactly over the full batch") {
    const Vector spec{1, 0.1, 2}, ws{1, 2, 3};
    for (std::size_t n : {15u, 16u, 1000u}) {
        const auto p = make_quadratic_problem(spec, ws, 0.7, n, 5);
        const Vector w{0.25, -1, 4};
        const Vector want{(0.25 - 1) * 1, (-1 - 2) * 0.1, (4 - 3) * 2};
        CHECK(p.model->gradient(w, full_batch(n)) == want);
        // but individual samples are noisy
        CHECK(p.model->gradient(w, batch_of({0})) != want);
    }
}

TEST_CASE("quadratic problem: mini-batch gradients are unbiased") {
    const Vector spec{1, 0.1}, ws{0, 0};
    const auto p = make_quadratic_problem(spec, ws, 1.0, 8, 2);
    const Vector w{1.5, -0.5};
    const Vector full = p.model->gradient(w, full_batch(8));
    for (std::size_t b = 1; b <= 3; ++b) {
        Vector mean(2);
        const auto all = oracle::subsets(8, b);
        for (const auto& s : all) axpy(1.0 / static_cast<double>(all.size()), p.model->gradient(w, batch_of(s)), mean);
        CHECK(oracle::max_abs_diff(mean, full) <= 1e-14);
    }
}

TEST_CASE("loss is the batch mean of per-sample losses") {
    const auto p = make_logistic_problem(3, 50, 1.0, 4);
    RngStream r(8);
    const Vector w = r.normal_vector(4);
    const MiniBatch b = batch_of({3, 7, 7, 20});
    double s = 0.0;
    for (auto i : b.indices) s += p.model->sample_loss(w, i);
    CHECK(p.model->loss(w, b) == doctest::Approx(s / 4).epsilon(1e-15));
}

TEST_CASE("logistic problem: ln 2 at the origin") {
    const auto p = make_logistic_problem(5, 100, 2.0, 0);
    CHECK(p.model->loss(Vector(6), full_batch(100)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("built-in models pass gradient and HVP checks at 10 random points") {
    const std::vector<Problem> problems = {
        make_quadratic_problem(Vector{-2, 0.5, 3}, Vector{1, 0, -1}, 0.3, 40, 1),
        make_logistic_problem(6, 300, 2.0, 2),
        make_mlp_problem(2, 6, 200, 3),
    };
    for (const auto& p : problems) {
        RngStream r(17);
        Vector center = p.model->initial_params(r);
        const auto rep = gradcheck_model(*p.model, center, full_batch(p.data->size()), RngStream(5), 10);
        INFO(p.model->family());
        CHECK(rep.points.size() == 10);
        for (const auto& pt : rep.points) {
            CHECK(pt.grad_rel_error <= 1e-5);
            CHECK(pt.hvp_rel_error <= 1e-4);
            CHECK(pt.symmetry_error <= 1e-4);
        }
        CHECK(rep.passed);
    }
}

TEST_CASE("mlp gradient matches finite differences at random points") {
    const auto p = make_mlp_problem(3, 5, 100, 8);
    RngStream r(2);
    const MiniBatch b = full_batch(100);
    for (int i = 0; i < 5; ++i) {
        const Vector w = r.normal_vector(p.model->param_count());
        const Vector fd = finite_diff_grad([&](const Vector& x) { return p.model->loss(x, b); }, w);
        CHECK(oracle::rel_error(p.model->gradient(w, b), fd) <= 1e-4);
    }
}

TEST_CASE("mlp with zero hidden weights reduces to a constant logistic output") {
    const auto p = make_mlp_problem(2, 4, 60, 1);
    const std::size_t n = p.model->param_count();
    Vector w(n);
    RngStream r(3);
    for (std::size_t h = 0; h < 4; ++h) w[2 * 4 + 4 + h] = r.normal();  // output weights only
    w[n - 1] = 0.3;                                                     // output bias
    const MiniBatch b = full_batch(60);

    for (std::size_t i = 0; i < 60; ++i) CHECK(p.model->predict(w, (*p.data)[i].features) == p.model->predict(w, (*p.data)[0].features));

    const LogisticModel lin(p.data, 0.0);
    const Vector lg = lin.gradient(Vector{0, 0, 0.3}, b);
    const Vector g = p.model->gradient(w, b);
    for (std::size_t h = 0; h < 4; ++h) CHECK(g[2 * 4 + 4 + h] == 0.0);
    CHECK(g[n - 1] == doctest::Approx(lg[2]).epsilon(1e-14));
}

TEST_CASE("mlp mini-batch Hessian at initialization is indefinite") {
    const auto p = make_mlp_problem(2, 16, 1000, 11);
    RngStream r(0);
    const Vector w0 = p.model->initial_params(r);
    MiniBatchSampler s(*p.data, 128, RngStream(4));
    const MiniBatch b = s.next();
    const auto dense = dense_sym_eigs(oracle::assembled_hessian(*p.model, w0, b));
    CHECK(dense.front() < 0.0);
    RngStream lr(1);
    const auto est = extremal_eigs(*p.model, w0, b, 20, lr);
    CHECK(est.lambda_min < 0.0);
}

TEST_CASE("make_problem dispatches and loads CSV data") {
    ProblemSpec spec;
    spec.family = ProblemFamily::logistic;
    spec.feature_dim = 3;
    spec.n_samples = 40;
    CHECK(make_problem(spec, 1).model->param_count() == 4);

    spec.data_path = write_file("blob.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,0\n").string();
    const auto p = make_problem(spec, 1);
    CHECK(p.data->size() == 3);
    CHECK(p.model->param_count() == 3);

    ProblemSpec q;
    q.spectrum = {1, 2, 3};
    const auto quad = make_problem(q, 4);
    CHECK(quad.model->param_count() == 3);
    CHECK(make_problem(q, 4).model->initial_params(*std::make_unique<RngStream>(0)) ==
          quad.model->initial_params(*std::make_unique<RngStream>(0)));
}

TEST_CASE("logspace endpoints") {
    const auto v = logspace(0.1, 1.0, 10);
    CHECK(v[0] == 0.1);
    CHECK(v[9] == 1.0);
    CHECK(v[5] > v[4]);
}
