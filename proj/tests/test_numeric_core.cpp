#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nopt/dense.hpp"
#include "nopt/errors.hpp"
#include "nopt/finite_diff.hpp"
#include "nopt/linear_operator.hpp"
#include "nopt/problems.hpp"
#include "nopt/richardson.hpp"
#include "nopt/rng.hpp"
#include "nopt/vector.hpp"
#include "oracles.hpp"

using namespace nopt;

TEST_CASE("vector kernels") {
    CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11.0);
    CHECK(norm(Vector{3, 4}) == 5.0);

    Vector y{1, 2};
    axpy(0.0, Vector{5, 5}, y);
    CHECK(y == Vector{1, 2});
    axpy(2.0, Vector{1, -1}, y);
    CHECK(y == Vector{3, 0});

    CHECK(scale(-2.0, Vector{1, 0.5}) == Vector{-2, -1});
    CHECK(lincomb(2.0, Vector{1, 1}, -1.0, Vector{0, 3}) == Vector{2, -1});
    CHECK(Vector::unit(3, 1) == Vector{0, 1, 0});
}

TEST_CASE("vector kernels reject length mismatch") {
    Vector y{1, 2};
    CHECK_THROWS_AS(dot(Vector{1}, Vector{1, 2}), DimensionError);
    CHECK_THROWS_AS(axpy(1.0, Vector{1, 2, 3}, y), DimensionError);
    CHECK_THROWS_AS(axpy(0.0, Vector{1, 2, 3}, y), DimensionError);
    CHECK_THROWS_AS(add(Vector{1}, Vector{1, 2}), DimensionError);
}

TEST_CASE("dot sums left to right") {
    // 1e16 + 1 - 1e16 loses the 1 in sequential order but not pairwise.
    CHECK(dot(Vector{1e16, 1, -1e16}, Vector{1, 1, 1}) == 0.0);
}

TEST_CASE("rng streams are reproducible and independent") {
    RngStream a(42), b(42), c(43);
    std::vector<double> xa, xb, xc;
    for (int i = 0; i < 100; ++i) {
        xa.push_back(a.normal());
        xb.push_back(b.normal());
        xc.push_back(c.normal());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);

    RngStream parent(7);
    const auto s1 = parent.substream("probe", 3);
    parent.uniform();
    parent.uniform();
    auto s2 = parent.substream("probe", 3);
    auto s1c = s1;
    CHECK(s1c.next_u64() == s2.next_u64());
    CHECK(parent.substream("probe", 3).seed() != parent.substream("probe", 4).seed());
    CHECK(parent.substream("probe", 3).seed() != parent.substream("batches", 3).seed());
}

TEST_CASE("rng draws stay in range and look plausible") {
    RngStream r(1);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double z = r.normal();
        sum += z;
        sq += z * z;
        REQUIRE(r.index(7) < 7);
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
    CHECK(norm(r.unit_vector(9)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linear operator checks dimensions and shifts") {
    auto op = LinearOperator::identity(3, 2.0);
    CHECK(op.apply(Vector{1, 2, 3}) == Vector{2, 4, 6});
    CHECK(op.shifted(-2.0).apply(Vector{1, 2, 3}) == Vector{0, 0, 0});
    CHECK_THROWS_AS(op.apply(Vector{1}), DimensionError);
}

TEST_CASE("dense operators are symmetric and linear") {
    std::mt19937_64 gen(5);
    const Eigen::MatrixXd m = oracle::random_symmetric(6, gen);
    const auto op = LinearOperator::from_dense(m);
    RngStream r(3);
    const double a_est = m.norm();
    for (int trial = 0; trial < 10; ++trial) {
        const Vector u = r.normal_vector(6), v = r.normal_vector(6);
        CHECK(std::abs(dot(op.apply(u), v) - dot(u, op.apply(v))) <= 1e-8 * (1 + norm(u) * norm(v) * a_est));
        const Vector lhs = op.apply(lincomb(2.0, u, -3.0, v));
        const Vector rhs = lincomb(2.0, op.apply(u), -3.0, op.apply(v));
        CHECK(oracle::rel_error(lhs, rhs) <= 1e-10);
    }
}

TEST_CASE("richardson: A = 0.5 I converges to 2b") {
    const auto a = LinearOperator::identity(2, 0.5);
    const Vector b{1, 1};
    const auto one = richardson_solve(a, b, 1, 1e-300);
    CHECK(one.solution == Vector{1.5, 1.5});

    const auto rep = richardson_solve(a, b, 200, 1e-12);
    REQUIRE(rep.converged);
    // independent oracle: invert through the eigendecomposition
    const auto eig = dense_sym_eigen(to_dense(a));
    const Eigen::VectorXd x =
        eig.vectors * Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(eig.values.data(), 2)).cwiseInverse().asDiagonal() *
        eig.vectors.transpose() * oracle::to_eigen(b);
    CHECK(oracle::rel_error(rep.solution, oracle::from_eigen(x)) <= 1e-11);
    CHECK(rep.final_residual <= 1e-12);
}

TEST_CASE("richardson: identity converges in one iteration") {
    const auto rep = richardson_solve(LinearOperator::identity(2), Vector{3, -1}, 10, 1e-12);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.solution == Vector{3, -1});
}

TEST_CASE("richardson: spectrum outside (0,2) diverges") {
    const auto rep = richardson_solve(LinearOperator::identity(1, 3.0), Vector{1}, 1000, 1e-10);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations < 1000);
    CHECK(std::isinf(rep.final_residual));
}

TEST_CASE("richardson: errors") {
    const auto a = LinearOperator::identity(2);
    CHECK_THROWS_AS(richardson_solve(a, Vector{1, 2, 3}, 10, 1e-8), DimensionError);
    CHECK_THROWS_AS(richardson_solve(a, Vector{1, NAN}, 10, 1e-8), NonFiniteError);
    CHECK_THROWS_AS(richardson_solve(a, Vector{1, 2}, 10, 0.0), InvalidArgument);
}

TEST_CASE("richardson: error contracts at rate rho(I - A) on random SPD systems") {
    std::mt19937_64 gen(11);
    RngStream r(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd m = oracle::random_spd(5, 0.1, 0.9, gen);
        const auto a = LinearOperator::from_dense(m);
        const Vector b = r.normal_vector(5);
        const Vector xstar = oracle::from_eigen(m.ldlt().solve(oracle::to_eigen(b)));
        const auto eig = dense_sym_eigs(m);
        const double rho = std::max(std::abs(1 - eig.front()), std::abs(1 - eig.back()));
        const double e0 = norm(sub(b, xstar));
        for (std::size_t t : {1u, 5u, 20u, 60u}) {
            const auto rep = richardson_solve(a, b, t, 1e-300);
            CHECK(norm(sub(rep.solution, xstar)) <= 2.0 * std::pow(rho, static_cast<double>(t)) * e0 + 1e-13 * norm(xstar));
        }
        const auto full = richardson_solve(a, b, 5000, 1e-13);
        REQUIRE(full.converged);
        CHECK(oracle::rel_error(full.solution, xstar) <= 1e-8);
    }
}

TEST_CASE("dense_sym_eigs examples") {
    Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
    CHECK(dense_sym_eigs(d) == std::vector<double>{1, 2, 3});

    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    const auto e = dense_sym_eigs(m);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(3.0).epsilon(1e-14));

    CHECK(dense_sym_eigs(Eigen::MatrixXd::Zero(4, 4)) == std::vector<double>(4, 0.0));
}

TEST_CASE("dense_sym_eigs: trace, order, errors") {
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd m = oracle::random_symmetric(30, gen);
    const auto e = dense_sym_eigs(m);
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        s += e[i];
        if (i > 0) CHECK(e[i - 1] <= e[i]);
    }
    CHECK(std::abs(s - m.trace()) <= 1e-8 * std::max(1.0, std::abs(m.trace())));

    const auto full = dense_sym_eigen(m);
    CHECK(full.vectors.cols() == 30);

    Eigen::Matrix2d bad;
    bad << 1, 2, 2.1, 1;
    CHECK_THROWS_AS(dense_sym_eigs(bad), InvalidArgument);
    CHECK_THROWS(dense_sym_eigs(Eigen::MatrixXd::Identity(5, 5), 4));
}

TEST_CASE("finite_diff_grad examples") {
    auto half_sq = [](const Vector& w) { return 0.5 * dot(w, w); };
    CHECK(oracle::max_abs_diff(finite_diff_grad(half_sq, Vector{1, -2}), Vector{1, -2}) < 1e-9);

    auto constant = [](const Vector&) { return 4.2; };
    CHECK(finite_diff_grad(constant, Vector{1, 2, 3}) == Vector{0, 0, 0});

    auto prod = [](const Vector& w) { return w[0] * w[1]; };
    CHECK(oracle::max_abs_diff(finite_diff_grad(prod, Vector{2, 3}), Vector{3, 2}) < 1e-9);

    auto bad = [](const Vector& w) { return w[0] > 1.0 ? NAN : 0.0; };
    CHECK_THROWS_AS(finite_diff_grad(bad, Vector{1}), NonFiniteError);
    CHECK_THROWS_AS(finite_diff_grad(half_sq, Vector{1}, 0.0), InvalidArgument);
}

TEST_CASE("finite_diff_hvp examples") {
    auto grad = [](const Vector& w) { return Vector{w[0], 0.1 * w[1]}; };
    CHECK(oracle::max_abs_diff(finite_diff_hvp(grad, Vector{0.3, -4}, Vector{1, 1}), Vector{1, 0.1}) < 1e-10);
    CHECK_THROWS_AS(finite_diff_hvp(grad, Vector{0, 0}, Vector{0, 0}), InvalidArgument);

    const auto p = make_logistic_problem(4, 200, 2.0, 9);
    RngStream r(4);
    const MiniBatch all = full_batch(200);
    for (int i = 0; i < 5; ++i) {
        const Vector w = r.normal_vector(5), v = r.normal_vector(5);
        const Vector fd = finite_diff_hvp([&](const Vector& x) { return p.model->gradient(x, all); }, w, v);
        CHECK(oracle::rel_error(fd, p.model->hvp(w, all, v)) <= 1e-5);
    }
}
