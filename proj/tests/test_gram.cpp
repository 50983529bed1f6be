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

#include "kcgflr/error.hpp"
#include "kcgflr/gram.hpp"
#include "kcgflr/model.hpp"
#include "oracles.hpp"

using namespace kcgflr;

TEST_CASE("gram_spectral examples") {
    const Eigen::Vector2d t(0.5, 0.25);
    const GramMatrix k = gram_spectral(Eigen::Matrix2d::Identity(), t);
    CHECK(k.entries() == (Eigen::Matrix2d() << 0.5, 0.0, 0.0, 0.25).finished());

    Eigen::MatrixXd ones(1, 2);
    ones << 1.0, 1.0;
    CHECK(gram_spectral(ones, t).entries()(0, 0) == 0.75);

    testing::Gen gen(4);
    CHECK(gram_spectral(gen.matrix(5, 3), Eigen::Vector3d::Zero()).entries().isZero());
    CHECK_THROWS_AS(gram_spectral(gen.matrix(5, 3), t), DimensionMismatch);
}

TEST_CASE("GramMatrix rejects asymmetric input") {
    CHECK_THROWS_AS(GramMatrix((Eigen::Matrix2d() << 1.0, 2.0, 2.1, 1.0).finished()), ContractViolation);
    CHECK_THROWS_AS(GramMatrix(Eigen::MatrixXd::Zero(2, 3)), ContractViolation);
    const GramMatrix sym = GramMatrix::symmetrized((Eigen::Matrix2d() << 1.0, 2.0, 4.0, 1.0).finished());
    CHECK(sym.entries()(0, 1) == 3.0);
}

TEST_CASE("gram_grid closed-form kernels") {
    const Grid g = make_uniform_grid(201);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 201);

    const GramMatrix constant = gram_grid(ones, GaussianKernel{std::numeric_limits<double>::infinity()}, g);
    CHECK((constant.entries().array() - 1.0).abs().maxCoeff() <= 1e-14);

    const GramMatrix brownian = gram_grid(ones.topRows(1), BrownianKernel{}, g);
    CHECK(std::abs(brownian.entries()(0, 0) - 1.0 / 3.0) <= 1e-3);

    const GramMatrix empty = gram_grid(Eigen::MatrixXd(0, 201), BrownianKernel{}, g);
    CHECK(empty.n() == 0);

    CHECK_THROWS_AS(gram_grid(ones, SpectralKernel{Eigen::VectorXd::Ones(3)}, g), WrongPath);
    CHECK_THROWS_AS(gram_grid(Eigen::MatrixXd::Ones(2, 50), BrownianKernel{}, g), DimensionMismatch);
    CHECK_THROWS_AS(gram_grid(ones, GaussianKernel{0.0}, g), InvalidArgument);
}

TEST_CASE("grid path agrees with the spectral path for cosine data") {
    const Grid g = make_uniform_grid(401);
    testing::Gen gen(5);
    ModelParams p;
    p.J = 20;
    const SpectralModel m = build_model(p);
    const CosineBasis basis(20);
    const Eigen::MatrixXd coefs = gen.matrix(6, 20);
    Eigen::MatrixXd samples(6, 401);
    for (Eigen::Index i = 0; i < 6; ++i)
        samples.row(i) = coefs_to_grid(CoefVector(coefs.row(i).transpose()), basis, g).values().transpose();

    const GramMatrix exact = gram_spectral(coefs, m.t);
    const GramMatrix quad = gram_from_kernel_matrix(samples, kernel_matrix(SpectralKernel{m.t}, g), g);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 6; ++j)
            CHECK(std::abs(quad.entries()(i, j) - exact.entries()(i, j)) <= 1e-3 * std::abs(exact.entries()(i, j)));
}

TEST_CASE("congruence preserves positive semidefiniteness") {
    testing::Gen gen(6);
    const Grid g = make_uniform_grid(101);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(1, 30);
        const Eigen::MatrixXd x = gen.matrix(n, 101);
        const KernelSpec kernel = trial % 2 == 0 ? KernelSpec{BrownianKernel{}} : KernelSpec{GaussianKernel{gen.uniform(0.05, 1.0)}};
        const GramMatrix k = gram_grid(x, kernel, g);
        CHECK(psd_check(k.entries(), 1e-10).passed);
    }
}

TEST_CASE("psd_check examples") {
    const PsdReport diag = psd_check((Eigen::Matrix2d() << 0.5, 0.0, 0.0, 0.25).finished());
    CHECK(diag.min_eigenvalue == doctest::Approx(0.25));
    CHECK(diag.passed);

    const PsdReport indefinite = psd_check((Eigen::Matrix2d() << 1.0, 2.0, 2.0, 1.0).finished());
    CHECK(indefinite.min_eigenvalue == doctest::Approx(-1.0));
    CHECK_FALSE(indefinite.passed);

    const PsdReport zero = psd_check(Eigen::MatrixXd::Zero(1, 1));
    CHECK(zero.min_eigenvalue == 0.0);
    CHECK(zero.passed);

    CHECK_THROWS_AS(psd_check((Eigen::Matrix2d() << 1.0, 0.5, 0.0, 1.0).finished()), ContractViolation);
}

TEST_CASE("Cholesky certificate agrees with the eigenvalue check") {
    testing::Gen gen(8);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = gen.integer(1, 25);
        const Eigen::MatrixXd x = gen.matrix(n, gen.integer(1, 30));
        Eigen::MatrixXd k = x * x.transpose();
        if (trial % 3 == 0) k.diagonal().array() -= gen.uniform(0.1, 2.0) * k.diagonal().maxCoeff();
        const GramMatrix gram = GramMatrix::symmetrized(k);
        const double top = largest_eigenvalue_estimate(gram);
        CHECK(psd_certify(gram, top) == psd_check(gram.entries()).passed);
    }
    CHECK(psd_certify(GramMatrix(Eigen::MatrixXd::Zero(3, 3)), 0.0));
}

TEST_CASE("t_half_apply") {
    CHECK(t_half_apply(CoefVector(Eigen::Vector2d(1.0, 1.0)), Eigen::Vector2d(4.0, 1.0)).coeffs() ==
          Eigen::Vector2d(2.0, 1.0));
    const Eigen::Vector3d c(0.3, -2.0, 5.0);
    CHECK(t_half_apply(CoefVector(c), Eigen::Vector3d::Ones()).coeffs() == c);
    CHECK(t_half_apply(CoefVector(Eigen::Vector2d::Zero()), Eigen::Vector2d(3.0, 7.0)).coeffs().isZero());
    CHECK_THROWS_AS(t_half_apply(CoefVector(c), Eigen::Vector3d(1.0, -1.0, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(t_half_apply(CoefVector(c), Eigen::Vector2d(1.0, 1.0)), DimensionMismatch);
}

TEST_CASE("empirical spectrum examples") {
    Eigen::MatrixXd x(1, 2);
    x << 1.0, 0.0;
    const Eigen::VectorXd single = empirical_lambda_eigs(gram_spectral(x, Eigen::Vector2d(0.5, 0.25)));
    REQUIRE(single.size() == 1);
    CHECK(single[0] == doctest::Approx(0.5));

    const Eigen::VectorXd two = empirical_lambda_eigs(GramMatrix((Eigen::Matrix2d() << 1.0, 0.0, 0.0, 2.0).finished()));
    CHECK(two[0] == doctest::Approx(1.0));
    CHECK(two[1] == doctest::Approx(0.5));

    CHECK_THROWS_AS(empirical_lambda_eigs(GramMatrix((Eigen::Matrix2d() << 1.0, 2.0, 2.0, 1.0).finished())),
                    PsdViolation);
}

TEST_CASE("Gram spectrum equals the coefficient-space empirical operator") {
    testing::Gen gen(9);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = gen.integer(1, 20);
        const int J = gen.integer(1, 20);
        const Eigen::MatrixXd x = gen.matrix(n, J);
        const Eigen::VectorXd t = gen.positive(J, 0.05, 1.0);
        const Eigen::VectorXd gram_eigs = empirical_lambda_eigs(gram_spectral(x, t));

        const Eigen::VectorXd root = t.cwiseSqrt();
        const Eigen::MatrixXd op = root.asDiagonal() * (x.transpose() * x) * root.asDiagonal() / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd coef_eigs = eig.eigenvalues().reverse();

        const double top = coef_eigs[0];
        const Eigen::Index shared = std::min<Eigen::Index>(n, J);
        for (Eigen::Index i = 0; i < shared; ++i) {
            if (coef_eigs[i] <= 1e-10 * top) continue;
            CHECK(std::abs(gram_eigs[i] - coef_eigs[i]) <= 1e-8 * coef_eigs[i]);
        }
        for (Eigen::Index i = shared; i < gram_eigs.size(); ++i) CHECK(std::abs(gram_eigs[i]) <= 1e-12 * top);
    }
}
