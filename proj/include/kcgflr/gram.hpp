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

#pragma once

#include <cstddef>
#include <variant>

#include <Eigen/Dense>

#include "kcgflr/grid.hpp"

namespace kcgflr {

/// n x n Gram matrix K_ij = <X_i, T X_j>. Square and exactly symmetric;
/// positive semidefiniteness is checked separately (psd_check, psd_certify).
class GramMatrix {
public:
    GramMatrix() = default;
    /// Throws ContractViolation unless `entries` is square and exactly symmetric.
    explicit GramMatrix(Eigen::MatrixXd entries);

    /// Builds from (M + M^T) / 2.
    static GramMatrix symmetrized(const Eigen::MatrixXd& m);

    std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

/// k(s, t) = sum_j t_j phi_j(s) phi_j(t) in the cosine basis.
struct SpectralKernel {
    Eigen::VectorXd eigenvalues;
};
/// k(s, t) = exp(-(s - t)^2 / (2 gamma^2)); gamma = +inf gives the constant kernel.
struct GaussianKernel {
    double bandwidth = 1.0;
};
/// k(s, t) = min(s, t).
struct BrownianKernel {};

using KernelSpec = std::variant<SpectralKernel, GaussianKernel, BrownianKernel>;

/// Exact Gram matrix from basis coefficients: K_ij = sum_k t_k x_ik x_jk.
GramMatrix gram_spectral(const Eigen::MatrixXd& xcoefs, const Eigen::VectorXd& t);

/// Kg[a, b] = k(point_a, point_b) for any kernel variant.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid);

/// Quadrature Gram matrix X W Kg W X^T from grid samples, symmetrized.
GramMatrix gram_from_kernel_matrix(const Eigen::MatrixXd& xgrid, const Eigen::MatrixXd& kg, const Grid& grid);

/// Quadrature Gram matrix for a closed-form kernel. The Spectral variant is
/// rejected with WrongPath; use gram_spectral for it.
GramMatrix gram_grid(const Eigen::MatrixXd& xgrid, const KernelSpec& kernel, const Grid& grid);

struct PsdReport {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool passed = true;  ///< min_eigenvalue >= -tol * max(max_eigenvalue, 0)
};

/// Dense eigenvalue check. Throws ContractViolation on non-symmetric input.
PsdReport psd_check(const Eigen::MatrixXd& k, double tol = 1e-10);

/// Power-iteration estimate of the largest eigenvalue of a PSD matrix.
double largest_eigenvalue_estimate(const GramMatrix& k, int iterations = 30);

/// Cholesky certificate that lambda_min(K) >= -tol * lambda_max(K): factors
/// K + tol * lambda_max * I. Cheaper than psd_check for large n.
bool psd_certify(const GramMatrix& k, double lambda_max, double tol = 1e-10);

/// Applies T^{1/2} in the shared eigenbasis. Throws on negative t_j.
CoefVector t_half_apply(const CoefVector& c, const Eigen::VectorXd& t);

/// Eigenvalues of K / n in decreasing order: the nonzero spectrum of the
/// empirical operator T^{1/2} C_n T^{1/2}. Throws PsdViolation.
Eigen::VectorXd empirical_lambda_eigs(const GramMatrix& k);

}  // namespace kcgflr
