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
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kcgflr/grid.hpp"
#include "kcgflr/gram.hpp"

namespace kcgflr {

// Kernel conjugate gradient for functional linear regression.
//
// The estimator lives in the span of the representers psi_i = J^* X_i, so
// beta_m = sum_i c_i psi_i and every operator reduces to the Gram matrix K:
// the normal operator J^* C_n J acts on coefficients as K / n, the right side
// J^* R_n has coefficients y / n, and the RKHS inner product of two
// combinations is a^T K b. The m-th iterate minimizes the RKHS norm of the
// normal-equation residual over the Krylov space span{(K/n)^l (y/n)}, l < m,
// which is a conjugate-residual iteration in the K-inner product.

struct FixedIterations {
    std::size_t m = 0;
};
struct Threshold {
    double omega = 0.0;
};
/// Threshold (2 + tau) n^{-(alpha+1)/(1+s+2 alpha)}, evaluated with the data's n.
struct TheoremSchedule {
    double tau = 1.0;
    double alpha = 1.0;
    double s = 0.5;
};
using StoppingRule = std::variant<FixedIterations, Threshold, TheoremSchedule>;

enum class StopReason { ThresholdMet, MaxIterations, KrylovExhausted };

std::string_view to_string(StopReason reason) noexcept;
std::optional<StopReason> parse_stop_reason(std::string_view text) noexcept;

struct IterationBudget {
    std::optional<std::size_t> m_max;  ///< defaults to n; must be >= 1 when set
    double degenerate_tol = 1e-14;     ///< relative curvature below which the Krylov space counts as exhausted
    bool reorthogonalize = false;      ///< keep all search directions mutually conjugate
    bool verify_psd = true;            ///< Cholesky certificate before iterating
};

struct FitResult {
    Eigen::VectorXd coeffs;     ///< representer coefficients c
    std::size_t m_star = 0;     ///< iterations performed
    std::vector<double> trace;  ///< residual RKHS norms r_0 .. r_{m*}
    StopReason stop_reason = StopReason::MaxIterations;
};

/// (2 + tau) * n^{-(alpha + 1) / (1 + s + 2 alpha)}.
double omega_threshold(double tau, double alpha, double s, std::size_t n);

/// Runs the iteration until the residual drops to the rule's threshold
/// (checked before the first step, compared with <=), the budget runs out,
/// or the directional curvature u^T K u falls below
/// degenerate_tol * lambda_max^3 * |pi|^2.
///
/// Throws PsdViolation when K fails the PSD certificate or a negative
/// curvature shows up mid-run, NumericalFailure on NaN/Inf.
FitResult cg_fit(const GramMatrix& k, const Eigen::VectorXd& y, const StoppingRule& rule,
                 const IterationBudget& budget = {});

/// (1/n) sqrt((y - Kc)^T K (y - Kc)).
double residual_hnorm(const GramMatrix& k, const Eigen::VectorXd& y, const Eigen::VectorXd& c);

/// Direct minimizer of the residual RKHS norm over the m-dimensional Krylov
/// space, via an explicit Krylov basis and a dense K-weighted least-squares
/// solve. Independent of the recurrence in cg_fit. Limited to n <= 32;
/// singular values below 1e-12 * max are cut.
Eigen::VectorXd oracle_fit(const GramMatrix& k, const Eigen::VectorXd& y, std::size_t m);

/// beta_j = t_j sum_i c_i x_ij.
CoefVector predict_beta(const Eigen::MatrixXd& xcoefs, const Eigen::VectorXd& t, const Eigen::VectorXd& c);

}  // namespace kcgflr
