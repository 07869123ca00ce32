#include <cmath>

#include "doctest.h"
#include "nopt/baselines.hpp"
#include "nopt/errors.hpp"
#include "nopt/problems.hpp"
#include "nopt/schedule.hpp"
#include "oracles.hpp"

using namespace nopt;

TEST_CASE("lr_at: warm-up ramp ends exactly at base_lr") {
    LrSchedule s{0.2, 3, 0, 1.0, 7};
    CHECK(lr_at(s, 1) == doctest::Approx(0.2 / 21));
    CHECK(lr_at(s, 10) == doctest::Approx(0.2 * 10 / 21));
    CHECK(lr_at(s, 21) == 0.2);
    CHECK(lr_at(s, 22) == 0.2);
    CHECK(lr_at(s, 5000) == 0.2);
}

TEST_CASE("lr_at: staircase decay") {
    LrSchedule s{0.045, 0, 2, 0.94, 10};
    // epoch 40 covers steps 401..410
    CHECK(lr_at(s, 401) == doctest::Approx(0.045 * std::pow(0.94, 20)).epsilon(1e-14));
    CHECK(lr_at(s, 410) == doctest::Approx(0.0131).epsilon(1e-3));
    CHECK(lr_at(s, 1) == 0.045);
    CHECK(lr_at(s, 20) == 0.045);
    CHECK(lr_at(s, 21) == doctest::Approx(0.045 * 0.94));

    LrSchedule w{1.0, 2, 1, 0.5, 1};
    CHECK(lr_at(w, 2) == 1.0);
    CHECK(lr_at(w, 3) == 1.0);
    CHECK(lr_at(w, 4) == 0.5);
}

TEST_CASE("lr schedule validation and linear scaling") {
    CHECK_THROWS(LrSchedule{0.0, 0, 0, 1.0, 1}.validate());
    CHECK_THROWS(LrSchedule{0.1, 0, 0, 1.5, 1}.validate());
    CHECK_THROWS(LrSchedule{0.1, 0, 0, 0.0, 1}.validate());
    CHECK(linearly_scaled_lr(0.1, 512, 256) == doctest::Approx(0.2));
    CHECK(linearly_scaled_lr(0.1, 512, 0) == 0.1);
}

TEST_CASE("sgd step") {
    auto st = make_optimizer_state(BaselineKind::sgd, 2);
    Vector w{0, 0};
    sgd_step(st, w, Vector{1, -1}, 0.1);
    CHECK(w == Vector{-0.1, 0.1});
    CHECK(st.step == 1);
}

TEST_CASE("momentum step") {
    auto st = make_optimizer_state(BaselineKind::momentum, 1);
    Vector w{2};
    momentum_step(st, w, Vector{1}, 0.1);
    CHECK(st.first == Vector{-0.1});
    CHECK(w == Vector{2 - 0.1});
    momentum_step(st, w, Vector{1}, 0.1);
    CHECK(st.first[0] == doctest::Approx(-0.19));

    auto z = make_optimizer_state(BaselineKind::momentum, 2);
    Vector u{1, 2};
    momentum_step(z, u, Vector{0, 0}, 0.5);
    CHECK(u == Vector{1, 2});
}

TEST_CASE("adam step") {
    auto st = make_optimizer_state(BaselineKind::adam, 2);
    Vector w{0, 0};
    adam_step(st, w, Vector{1, 0}, 0.1);
    CHECK(w[0] == doctest::Approx(-0.1).epsilon(1e-7));
    CHECK(w[1] == 0.0);

    auto big = make_optimizer_state(BaselineKind::adam, 2);
    Vector w2{0, 0};
    adam_step(big, w2, Vector{10, 0}, 0.1);
    CHECK(std::abs(w2[0] - w[0]) < 1e-8);

    auto zero = make_optimizer_state(BaselineKind::adam, 2);
    Vector w3{1, 1};
    for (int i = 0; i < 10; ++i) adam_step(zero, w3, Vector{0, 0}, 0.1);
    CHECK(w3 == Vector{1, 1});
}

TEST_CASE("rmsprop step") {
    auto st = make_optimizer_state(BaselineKind::rmsprop, 1);
    Vector w{0};
    rmsprop_step(st, w, Vector{2}, 0.1);
    CHECK(st.second[0] == doctest::Approx(0.4));
    CHECK(w[0] == doctest::Approx(-0.1 * 2 / (std::sqrt(0.4) + 1e-10)).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(-0.3162).epsilon(1e-4));

    auto z = make_optimizer_state(BaselineKind::rmsprop, 1);
    Vector u{3};
    rmsprop_step(z, u, Vector{0}, 0.1);
    CHECK(u == Vector{3});

    auto c = make_optimizer_state(BaselineKind::rmsprop, 1);
    Vector x{0};
    double prev = 0.0;
    for (int i = 0; i < 300; ++i) {
        prev = x[0];
        rmsprop_step(c, x, Vector{-5}, 0.1);
    }
    CHECK(x[0] - prev == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("steps reject non-finite gradients without mutating state") {
    for (auto kind : {BaselineKind::sgd, BaselineKind::momentum, BaselineKind::adam, BaselineKind::rmsprop}) {
        auto st = make_optimizer_state(kind, 2);
        Vector w{1, 2};
        CHECK_THROWS_AS(baseline_step(st, w, Vector{NAN, 0}, 0.1), NonFiniteError);
        CHECK(w == Vector{1, 2});
        CHECK(st.step == 0);
        CHECK_THROWS_AS(baseline_step(st, w, Vector{1}, 0.1), DimensionError);
    }
}

TEST_CASE("all baselines drive the logistic gradient below 1e-6") {
    const auto p = make_logistic_problem(4, 400, 2.0, 3);
    const MiniBatch all = full_batch(400);
    struct Run {
        BaselineKind kind;
        LrSchedule lr;
    };
    const std::vector<Run> runs = {
        {BaselineKind::sgd, {5.0, 0, 0, 1.0, 1}},
        {BaselineKind::momentum, {1.0, 0, 0, 1.0, 1}},
        {BaselineKind::adam, {0.05, 0, 500, 0.5, 1}},
        {BaselineKind::rmsprop, {0.01, 0, 500, 0.5, 1}},
    };
    for (const auto& run : runs) {
        auto st = make_optimizer_state(run.kind, 5);
        Vector w(5);
        double gn = 1.0;
        for (long t = 1; t <= 20000 && gn >= 1e-6; ++t) {
            const Vector g = p.model->gradient(w, all);
            gn = norm(g);
            if (gn < 1e-6) break;
            baseline_step(st, w, g, lr_at(run.lr, t));
        }
        INFO(to_string(run.kind));
        CHECK(gn < 1e-6);
    }
}

TEST_CASE("full-batch sgd on a quadratic decreases the loss monotonically") {
    const auto p = make_quadratic_problem(logspace(0.01, 1.0, 8), Vector(8, 1.0), 0.5, 10, 1);
    const MiniBatch all = full_batch(10);
    auto st = make_optimizer_state(BaselineKind::sgd, 8);
    RngStream r(0);
    Vector w = p.model->initial_params(r);
    double prev = p.model->loss(w, all);
    for (int i = 0; i < 200; ++i) {
        sgd_step(st, w, p.model->gradient(w, all), 1.9);
        const double l = p.model->loss(w, all);
        REQUIRE(l < prev);
        prev = l;
    }
}

TEST_CASE("baseline names round-trip") {
    for (auto k : {BaselineKind::sgd, BaselineKind::momentum, BaselineKind::adam, BaselineKind::rmsprop})
        CHECK(parse_baseline_kind(to_string(k)) == k);
    CHECK_FALSE(parse_baseline_kind("lbfgs").has_value());
}
