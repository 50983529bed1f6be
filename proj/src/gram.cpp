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

#include "kcgflr/gram.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "kcgflr/error.hpp"
#include "kcgflr/kernels.hpp"

namespace kcgflr {

namespace {

void require_square_symmetric(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() != m.cols()) throw ContractViolation(std::string(who) + ": matrix is not square");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            if (m(i, j) != m(j, i)) throw ContractViolation(std::string(who) + ": matrix is not symmetric");
}

double kernel_value(const KernelSpec& kernel, const CosineBasis* basis, double s, double t) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, SpectralKernel>) {
                double acc = 0.0;
                for (std::size_t j = 0; j < basis->size(); ++j)
                    acc += k.eigenvalues[static_cast<Eigen::Index>(j)] * (*basis)(j, s) * (*basis)(j, t);
                return acc;
            } else if constexpr (std::is_same_v<K, GaussianKernel>) {
                if (std::isinf(k.bandwidth)) return 1.0;
                const double d = s - t;
                return std::exp(-d * d / (2.0 * k.bandwidth * k.bandwidth));
            } else {
                return std::min(s, t);
            }
        },
        kernel);
}

}  // namespace

GramMatrix::GramMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    require_square_symmetric(entries_, "GramMatrix");
}

GramMatrix GramMatrix::symmetrized(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ContractViolation("GramMatrix: matrix is not square");
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    return GramMatrix(std::move(sym));
}

GramMatrix gram_spectral(const Eigen::MatrixXd& xcoefs, const Eigen::VectorXd& t) {
    if (xcoefs.cols() != t.size())
        throw DimensionMismatch("gram_spectral: X has " + std::to_string(xcoefs.cols()) + " columns but " +
                                std::to_string(t.size()) + " eigenvalues were given");
    return GramMatrix(kernels::omp::gram_spectral(xcoefs, t));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid) {
    std::optional<CosineBasis> basis;
    if (const auto* spectral = std::get_if<SpectralKernel>(&kernel)) {
        if (spectral->eigenvalues.size() < 1) throw InvalidArgument("spectral kernel needs at least one eigenvalue");
        if ((spectral->eigenvalues.array() <= 0.0).any())
            throw InvalidArgument("spectral kernel eigenvalues must be positive");
        basis.emplace(static_cast<std::size_t>(spectral->eigenvalues.size()));
    }
    if (const auto* gauss = std::get_if<GaussianKernel>(&kernel); gauss && !(gauss->bandwidth > 0.0))
        throw InvalidArgument("Gaussian kernel bandwidth must be positive");

    const auto& pts = grid.points();
    const auto size = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd kg(size, size);
    for (Eigen::Index b = 0; b < size; ++b)
        for (Eigen::Index a = 0; a <= b; ++a)
            kg(a, b) = kg(b, a) = kernel_value(kernel, basis ? &*basis : nullptr, pts[a], pts[b]);
    return kg;
}

GramMatrix gram_from_kernel_matrix(const Eigen::MatrixXd& xgrid, const Eigen::MatrixXd& kg, const Grid& grid) {
    const auto size = static_cast<Eigen::Index>(grid.size());
    if (xgrid.cols() != size || kg.rows() != size || kg.cols() != size)
        throw DimensionMismatch("gram_grid: sample matrix, kernel matrix and grid sizes disagree");
    if (xgrid.rows() == 0) return GramMatrix(Eigen::MatrixXd(0, 0));
    const Eigen::Map<const Eigen::VectorXd> w(grid.weights().data(), size);
    const Eigen::MatrixXd weighted = xgrid * w.asDiagonal();
    return GramMatrix::symmetrized(kernels::omp::congruence(weighted, kg));
}

GramMatrix gram_grid(const Eigen::MatrixXd& xgrid, const KernelSpec& kernel, const Grid& grid) {
    if (std::holds_alternative<SpectralKernel>(kernel))
        throw WrongPath("gram_grid: spectral kernels take the exact path, use gram_spectral");
    if (xgrid.cols() != static_cast<Eigen::Index>(grid.size()))
        throw DimensionMismatch("gram_grid: samples have " + std::to_string(xgrid.cols()) + " columns, grid has " +
                                std::to_string(grid.size()) + " points");
    return gram_from_kernel_matrix(xgrid, kernel_matrix(kernel, grid), grid);
}

PsdReport psd_check(const Eigen::MatrixXd& k, double tol) {
    require_square_symmetric(k, "psd_check");
    PsdReport report;
    if (k.rows() == 0) return report;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("psd_check: eigensolver did not converge", 0);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.max_eigenvalue = solver.eigenvalues().maxCoeff();
    report.passed = report.min_eigenvalue >= -tol * std::max(report.max_eigenvalue, 0.0);
    return report;
}

double largest_eigenvalue_estimate(const GramMatrix& k, int iterations) {
    const auto n = static_cast<Eigen::Index>(k.n());
    if (n == 0) return 0.0;
    // Deterministic start with weight on every coordinate.
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
    Eigen::VectorXd w;
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        kernels::omp::symv(k.entries(), v, w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        estimate = norm;
        v = w / norm;
    }
    // Diagonal maximum is a lower bound too; guard against a start vector
    // nearly orthogonal to the top eigenvector.
    return std::max(estimate, k.entries().diagonal().maxCoeff());
}

bool psd_certify(const GramMatrix& k, double lambda_max, double tol) {
    const auto n = static_cast<Eigen::Index>(k.n());
    if (n == 0) return true;
    if (lambda_max <= 0.0) return (k.entries().array() == 0.0).all();
    Eigen::MatrixXd shifted = k.entries();
    shifted.diagonal().array() += tol * lambda_max;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    return llt.info() == Eigen::Success;
}

CoefVector t_half_apply(const CoefVector& c, const Eigen::VectorXd& t) {
    if (static_cast<Eigen::Index>(c.size()) != t.size())
        throw DimensionMismatch("t_half_apply: coefficient and eigenvalue lengths differ");
    if ((t.array() < 0.0).any()) throw InvalidArgument("t_half_apply: eigenvalues must be nonnegative");
    return CoefVector(t.cwiseSqrt().cwiseProduct(c.coeffs()));
}

Eigen::VectorXd empirical_lambda_eigs(const GramMatrix& k) {
    if (k.n() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.entries() / static_cast<double>(k.n()),
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("empirical_lambda_eigs: eigensolver did not converge", 0);
    Eigen::VectorXd eigs = solver.eigenvalues().reverse();
    if (eigs[eigs.size() - 1] < -1e-10 * std::max(eigs[0], 0.0))
        throw PsdViolation("empirical_lambda_eigs: smallest eigenvalue " + std::to_string(eigs[eigs.size() - 1]) +
                           " violates PSD tolerance");
    return eigs;
}

}  // namespace kcgflr
