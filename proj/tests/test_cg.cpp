/*
 * Copyright 2026 The kcgflr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <limits>

#include <omp.h>

#include "kcgflr/cg.hpp"
#include "kcgflr/error.hpp"
#include "kcgflr/gram.hpp"
#include "oracles.hpp"

using namespace kcgflr;
using testing::rel_diff;

namespace {

GramMatrix gram(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return GramMatrix(m);
}

struct Instance {
    Eigen::MatrixXd x;
    Eigen::VectorXd t;
    GramMatrix k;
    Eigen::VectorXd y;
};

// Full-rank random instance: J >= n so K = X T X^T is nonsingular.
Instance random_instance(testing::Gen& gen, int n_max, int extra_cols = 4) {
    const int n = gen.integer(2, n_max);
    const int J = n + gen.integer(0, extra_cols);
    Instance inst;
    inst.x = gen.matrix(n, J);
    inst.t = gen.positive(J, 0.1, 1.0);
    inst.k = gram_spectral(inst.x, inst.t);
    inst.y = gen.vector(n);
    return inst;
}

}  // namespace

TEST_CASE("omega_threshold") {
    CHECK(std::abs(omega_threshold(1.0, 0.5, 0.5, 1000) - 0.047547) <= 1e-6);
    CHECK(omega_threshold(1.0, 0.5, 0.5, 1) == 3.0);
    CHECK(omega_threshold(2.5, 1.0, 0.3, 1) == 4.5);
    // exponent tends to -1/2 as alpha grows
    const double big = omega_threshold(1.0, 1e8, 0.5, 10000);
    CHECK(big == doctest::Approx(3.0 / 100.0).epsilon(1e-6));
    CHECK(omega_threshold(1.0, 1.0, 0.5, 100) > omega_threshold(1.0, 1.0, 0.5, 1000));

    CHECK_THROWS_AS(omega_threshold(0.0, 1.0, 0.5, 10), InvalidConfig);
    CHECK_THROWS_AS(omega_threshold(1.0, -1.0, 0.5, 10), InvalidConfig);
    CHECK_THROWS_AS(omega_threshold(1.0, 1.0, 1.0, 10), InvalidConfig);
    CHECK_THROWS_AS(omega_threshold(1.0, 1.0, 0.5, 0), InvalidConfig);
}

TEST_CASE("cg_fit small exact cases") {
    const FitResult one = cg_fit(gram({{2.0}}), Eigen::VectorXd::Constant(1, 3.0), FixedIterations{1});
    CHECK(one.coeffs[0] == doctest::Approx(1.5));
    REQUIRE(one.trace.size() == 2);
    CHECK(one.trace[0] == doctest::Approx(4.24264).epsilon(1e-6));
    CHECK(one.trace[1] <= 1e-12);
    CHECK(one.m_star == 1);

    const GramMatrix diag = gram({{1.0, 0.0}, {0.0, 2.0}});
    const Eigen::Vector2d y(1.0, 1.0);
    const FitResult full = cg_fit(diag, y, FixedIterations{2});
    CHECK(full.coeffs[0] == doctest::Approx(1.0));
    CHECK(full.coeffs[1] == doctest::Approx(0.5));
    CHECK(full.trace.back() <= 1e-12);

    // a_0 = n |K rho_0|^2 / (u^T K u) = 2 * 1.25 / 2.25, c = a_0 * y / n
    const FitResult first = cg_fit(diag, y, FixedIterations{1});
    CHECK(std::abs(first.coeffs[0] - 5.0 / 9.0) <= 1e-10);
    CHECK(std::abs(first.coeffs[1] - 5.0 / 9.0) <= 1e-10);
    CHECK((first.coeffs - oracle_fit(diag, y, 1)).norm() <= 1e-10);
    CHECK(std::abs(first.coeffs[0] - 0.55556) <= 1e-5);
}

TEST_CASE("cg_fit stopping semantics") {
    const GramMatrix k = gram({{2.0}});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 3.0);

    const FitResult zero = cg_fit(k, y, FixedIterations{0});
    CHECK(zero.m_star == 0);
    CHECK(zero.coeffs.isZero());
    CHECK(zero.stop_reason == StopReason::MaxIterations);

    // the threshold is checked before the first step, with <=
    const FitResult tie = cg_fit(k, y, Threshold{std::sqrt(18.0)});
    CHECK(tie.m_star == 0);
    CHECK(tie.stop_reason == StopReason::ThresholdMet);
    const FitResult below = cg_fit(k, y, Threshold{std::sqrt(18.0) * 0.999});
    CHECK(below.m_star == 1);
    CHECK(below.stop_reason == StopReason::ThresholdMet);

    testing::Gen gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(gen, 40);
        const TheoremSchedule rule{gen.uniform(0.2, 3.0), gen.uniform(0.3, 2.0), gen.uniform(0.2, 0.8)};
        const double omega = omega_threshold(rule.tau, rule.alpha, rule.s, inst.k.n());
        const FitResult fit = cg_fit(inst.k, inst.y, rule);
        CHECK(fit.m_star + 1 == fit.trace.size());
        if (fit.stop_reason == StopReason::ThresholdMet) {
            CHECK(fit.trace.back() <= omega);
            for (std::size_t m = 0; m + 1 < fit.trace.size(); ++m) CHECK(fit.trace[m] > omega);
        } else {
            for (double r : fit.trace) CHECK(r > omega);
        }
    }

    IterationBudget budget;
    budget.m_max = 2;
    const Instance inst = random_instance(gen, 10);
    const FitResult capped = cg_fit(inst.k, inst.y, Threshold{1e-300}, budget);
    CHECK(capped.m_star == 2);
    CHECK(capped.stop_reason == StopReason::MaxIterations);
    budget.m_max = 0;
    CHECK_THROWS_AS(cg_fit(inst.k, inst.y, Threshold{1.0}, budget), InvalidConfig);
    CHECK_THROWS_AS(cg_fit(inst.k, inst.y, Threshold{0.0}), InvalidConfig);
}

TEST_CASE("cg_fit error paths") {
    CHECK_THROWS_AS(cg_fit(gram({{1.0, 2.0}, {2.0, 1.0}}), Eigen::Vector2d(1.0, 1.0), FixedIterations{2}), PsdViolation);
    CHECK_THROWS_AS(cg_fit(gram({{1.0, 0.0}, {0.0, 2.0}}), Eigen::Vector3d(1.0, 1.0, 1.0), FixedIterations{1}),
                    DimensionMismatch);
    CHECK_THROWS_AS(cg_fit(GramMatrix(Eigen::MatrixXd(0, 0)), Eigen::VectorXd(0), FixedIterations{1}), InvalidArgument);
    CHECK_THROWS_AS(cg_fit(gram({{1.0}}), Eigen::VectorXd::Constant(1, std::nan("")), FixedIterations{1}),
                    NumericalFailure);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(cg_fit(gram({{inf}}), Eigen::VectorXd::Constant(1, 1.0), FixedIterations{1}), NumericalFailure);

    // without the certificate, negative curvature is caught mid-run
    IterationBudget unchecked;
    unchecked.verify_psd = false;
    CHECK_THROWS_AS(cg_fit(gram({{1.0, 2.0}, {2.0, 1.0}}), Eigen::Vector2d(1.0, -1.0), FixedIterations{2}, unchecked),
                    PsdViolation);
}

TEST_CASE("cg_fit detects Krylov exhaustion on rank-deficient K") {
    testing::Gen gen(22);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(6, 20);
        const int rank = gen.integer(1, 4);
        const Eigen::MatrixXd x = gen.matrix(n, rank);
        const GramMatrix k = gram_spectral(x, gen.positive(rank, 0.2, 1.0));
        const Eigen::VectorXd y = gen.vector(n);
        const FitResult fit = cg_fit(k, y, FixedIterations{static_cast<std::size_t>(n)});
        CHECK(fit.stop_reason == StopReason::KrylovExhausted);
        CHECK(fit.m_star <= static_cast<std::size_t>(rank));
        // sqrt(rho^T K rho) cannot resolve below ~sqrt(eps) once rho sits in the null space
        CHECK(fit.trace.back() <= 1e-6 * fit.trace.front());
    }
    // y in the null space of K: nothing to fit
    const FitResult null = cg_fit(gram({{1.0, 1.0}, {1.0, 1.0}}), Eigen::Vector2d(1.0, -1.0), FixedIterations{2});
    CHECK(null.stop_reason == StopReason::KrylovExhausted);
    CHECK(null.m_star == 0);
    CHECK(null.trace.front() == 0.0);
}

TEST_CASE("residual_hnorm") {
    const GramMatrix k = gram({{2.0}});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 3.0);
    CHECK(residual_hnorm(k, y, Eigen::VectorXd::Zero(1)) == doctest::Approx(std::sqrt(18.0)));
    CHECK(residual_hnorm(k, y, Eigen::VectorXd::Constant(1, 1.5)) <= 1e-12);

    testing::Gen gen(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(gen, 12);
        const Eigen::VectorXd exact = inst.k.entries().ldlt().solve(inst.y);
        CHECK(residual_hnorm(inst.k, inst.y, exact) <= 1e-9 * residual_hnorm(inst.k, inst.y, Eigen::VectorXd::Zero(inst.y.size())));
        const Eigen::VectorXd c = gen.vector(inst.y.size());
        CHECK(rel_diff(residual_hnorm(inst.k, inst.y, c), testing::residual_by_eigen(inst.k.entries(), inst.y, c)) <= 1e-10);
        CHECK(rel_diff(residual_hnorm(inst.k, inst.y, c), testing::coefficient_space_residual(inst.x, inst.t, inst.y, c)) <=
              1e-8);
    }
    CHECK_THROWS_AS(residual_hnorm(k, Eigen::Vector2d(1.0, 1.0), Eigen::VectorXd::Zero(1)), DimensionMismatch);
    CHECK_THROWS_AS(residual_hnorm(gram({{1.0, 2.0}, {2.0, 1.0}}), Eigen::Vector2d(1.0, -1.0), Eigen::Vector2d::Zero()),
                    PsdViolation);
}

TEST_CASE("oracle_fit") {
    CHECK(oracle_fit(gram({{2.0}}), Eigen::VectorXd::Constant(1, 3.0), 1)[0] == doctest::Approx(1.5));
    CHECK(oracle_fit(gram({{2.0}}), Eigen::VectorXd::Constant(1, 3.0), 0).isZero());

    testing::Gen gen(24);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(gen, 10);
        const Eigen::VectorXd exact = inst.k.entries().ldlt().solve(inst.y);
        CHECK(rel_diff(oracle_fit(inst.k, inst.y, inst.k.n()), exact) <= 1e-8);
    }

    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd x = gen.matrix(6, 6);
        const GramMatrix k = gram_spectral(x, Eigen::VectorXd::Ones(6));
        const Eigen::VectorXd y = gen.vector(6);
        for (std::size_t m = 1; m <= 5; ++m) {
            const double oracle = residual_hnorm(k, y, oracle_fit(k, y, m));
            const double cg = residual_hnorm(k, y, cg_fit(k, y, FixedIterations{m}).coeffs);
            CHECK(rel_diff(oracle, cg) <= 1e-8);
        }
    }

    CHECK_THROWS_AS(oracle_fit(GramMatrix(Eigen::MatrixXd::Identity(33, 33)), Eigen::VectorXd::Ones(33), 1),
                    InvalidArgument);
    CHECK_THROWS_AS(oracle_fit(gram({{2.0}}), Eigen::VectorXd::Constant(1, 3.0), 2), InvalidArgument);
}

TEST_CASE("predict_beta") {
    Eigen::MatrixXd x(1, 2);
    x << 1.0, 0.0;
    const Eigen::Vector2d t(0.5, 0.25);
    CHECK(predict_beta(x, t, Eigen::VectorXd::Constant(1, 2.0)).coeffs() == Eigen::Vector2d(1.0, 0.0));
    CHECK(predict_beta(x, t, Eigen::VectorXd::Zero(1)).coeffs().isZero());
    Eigen::MatrixXd twice(2, 2);
    twice << 1.0, 0.0, 1.0, 0.0;
    CHECK(predict_beta(twice, t, Eigen::Vector2d(0.5, 0.5)).coeffs() ==
          predict_beta(x, t, Eigen::VectorXd::Constant(1, 1.0)).coeffs());
    CHECK_THROWS_AS(predict_beta(x, Eigen::Vector3d::Ones(), Eigen::VectorXd::Zero(1)), DimensionMismatch);
    CHECK_THROWS_AS(predict_beta(x, t, Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST_CASE("Krylov optimality against random polynomial estimators") {
    testing::Gen gen(25);
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = random_instance(gen, 8);
        const auto n = static_cast<std::size_t>(inst.y.size());
        const std::size_t m = static_cast<std::size_t>(gen.integer(1, static_cast<int>(std::min<std::size_t>(5, n - 1))));
        const double cg = residual_hnorm(inst.k, inst.y, cg_fit(inst.k, inst.y, FixedIterations{m}).coeffs);
        const double oracle = residual_hnorm(inst.k, inst.y, oracle_fit(inst.k, inst.y, m));
        CHECK(rel_diff(cg, oracle) <= 1e-8);
        for (int draw = 0; draw < 100; ++draw) {
            const Eigen::VectorXd poly = gen.vector(static_cast<Eigen::Index>(m)) * gen.uniform(0.1, 10.0);
            const Eigen::VectorXd c = testing::polynomial_estimator(inst.k.entries(), inst.y, poly);
            CHECK(cg <= residual_hnorm(inst.k, inst.y, c) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("residual trace is nonincreasing") {
    testing::Gen gen(26);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = gen.integer(2, 60);
        const int J = gen.integer(1, 80);
        const Eigen::MatrixXd x = gen.matrix(n, J);
        const GramMatrix k = gram_spectral(x, gen.positive(J, 0.01, 1.0));
        const FitResult fit = cg_fit(k, gen.vector(n), FixedIterations{static_cast<std::size_t>(n)});
        for (std::size_t m = 1; m < fit.trace.size(); ++m) CHECK(fit.trace[m] <= fit.trace[m - 1]);
        for (double r : fit.trace) CHECK(r >= 0.0);
    }
}

TEST_CASE("full iteration reaches the exact solution") {
    testing::Gen gen(27);
    IterationBudget reorth;
    reorth.reorthogonalize = true;
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(gen, 12, 10);
        const FitResult fit = cg_fit(inst.k, inst.y, FixedIterations{inst.k.n()}, reorth);
        CHECK(fit.trace.back() <= 1e-10 * fit.trace.front());
        CHECK(residual_hnorm(inst.k, inst.y, fit.coeffs) <= 1e-10 * fit.trace.front());
    }
    // The plain recurrence keeps finite termination only while K is well
    // conditioned; many more columns than rows keeps cond(K) small.
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 12);
        const Eigen::MatrixXd x = gen.matrix(n, 20 * n);
        const GramMatrix k = gram_spectral(x, gen.positive(20 * n, 0.5, 1.0));
        const Eigen::VectorXd y = gen.vector(n);
        const FitResult fit = cg_fit(k, y, FixedIterations{k.n()});
        CHECK(fit.trace.back() <= 1e-10 * fit.trace.front());
    }
}

TEST_CASE("response equivariance and kernel-scale invariance") {
    testing::Gen gen(28);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = random_instance(gen, 12);
        const std::size_t m = static_cast<std::size_t>(gen.integer(1, static_cast<int>(inst.k.n()) - 1));
        const Eigen::VectorXd base = cg_fit(inst.k, inst.y, FixedIterations{m}).coeffs;
        for (double gamma : {0.01, 0.5, 3.0, 1e3}) {
            const Eigen::VectorXd scaled = cg_fit(inst.k, gamma * inst.y, FixedIterations{m}).coeffs;
            CHECK(rel_diff(scaled, gamma * base) <= 1e-8);
        }
        // power-of-two scaling commutes with every rounding step
        const Eigen::VectorXd exact = cg_fit(inst.k, 8.0 * inst.y, FixedIterations{m}).coeffs;
        CHECK((exact.array() == (8.0 * base).array()).all());
        const Eigen::VectorXd beta = predict_beta(inst.x, inst.t, base).coeffs();
        for (double gamma : {0.1, 10.0}) {
            const GramMatrix k_scaled = gram_spectral(inst.x, gamma * inst.t);
            const Eigen::VectorXd c = cg_fit(k_scaled, inst.y, FixedIterations{m}).coeffs;
            CHECK(rel_diff(predict_beta(inst.x, gamma * inst.t, c).coeffs(), beta) <= 1e-8);
        }
    }
}

TEST_CASE("reorthogonalized run agrees with the plain recurrence") {
    testing::Gen gen(29);
    IterationBudget reorth;
    reorth.reorthogonalize = true;
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(gen, 20);
        const std::size_t m = std::min<std::size_t>(6, inst.k.n());
        const FitResult plain = cg_fit(inst.k, inst.y, FixedIterations{m});
        const FitResult stable = cg_fit(inst.k, inst.y, FixedIterations{m}, reorth);
        CHECK(rel_diff(plain.coeffs, stable.coeffs) <= 1e-8);
    }
}

TEST_CASE("cg_fit is independent of the thread count") {
    testing::Gen gen(30);
    const Eigen::MatrixXd x = gen.matrix(600, 40);
    const GramMatrix k = gram_spectral(x, gen.positive(40, 0.01, 1.0));
    const Eigen::VectorXd y = gen.vector(600);
    omp_set_num_threads(1);
    const FitResult serial = cg_fit(k, y, FixedIterations{25});
    omp_set_num_threads(4);
    const FitResult parallel = cg_fit(k, y, FixedIterations{25});
    CHECK((serial.coeffs.array() == parallel.coeffs.array()).all());
    CHECK(serial.trace == parallel.trace);
}
