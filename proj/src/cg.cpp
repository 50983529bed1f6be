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

#include "kcgflr/cg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kcgflr/error.hpp"
#include "kcgflr/kernels.hpp"

namespace kcgflr {

namespace {

struct Direction {
    Eigen::VectorXd pi;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double uv = 0.0;
};

std::optional<double> threshold_for(const StoppingRule& rule, std::size_t n) {
    if (const auto* t = std::get_if<Threshold>(&rule)) return t->omega;
    if (const auto* t = std::get_if<TheoremSchedule>(&rule)) return omega_threshold(t->tau, t->alpha, t->s, n);
    return std::nullopt;
}

void validate_rule(const StoppingRule& rule) {
    if (const auto* t = std::get_if<Threshold>(&rule); t && !(t->omega > 0.0))
        throw InvalidConfig("omega", "threshold must be positive");
}

}  // namespace

std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::ThresholdMet: return "threshold-met";
        case StopReason::MaxIterations: return "max-iterations";
        case StopReason::KrylovExhausted: return "krylov-exhausted";
    }
    return "unknown";
}

std::optional<StopReason> parse_stop_reason(std::string_view text) noexcept {
    for (auto r : {StopReason::ThresholdMet, StopReason::MaxIterations, StopReason::KrylovExhausted})
        if (to_string(r) == text) return r;
    return std::nullopt;
}

double omega_threshold(double tau, double alpha, double s, std::size_t n) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidConfig("tau", "must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha", "must be positive");
    if (!(s > 0.0 && s < 1.0)) throw InvalidConfig("s", "must lie in (0, 1)");
    if (n < 1) throw InvalidConfig("n", "must be >= 1");
    const double exponent = -(alpha + 1.0) / (1.0 + s + 2.0 * alpha);
    return (2.0 + tau) * std::pow(static_cast<double>(n), exponent);
}

FitResult cg_fit(const GramMatrix& k, const Eigen::VectorXd& y, const StoppingRule& rule,
                 const IterationBudget& budget) {
    const std::size_t n = k.n();
    if (n < 1) throw InvalidArgument("cg_fit: need at least one sample");
    if (static_cast<std::size_t>(y.size()) != n)
        throw DimensionMismatch("cg_fit: y has length " + std::to_string(y.size()) + ", K is " + std::to_string(n) +
                                "x" + std::to_string(n));
    if (budget.m_max && *budget.m_max < 1) throw InvalidConfig("m_max", "must be >= 1");
    if (!y.allFinite()) throw NumericalFailure("cg_fit: non-finite response", 0);
    validate_rule(rule);

    const auto& km = k.entries();
    const double nd = static_cast<double>(n);
    const double lambda_max = largest_eigenvalue_estimate(k);
    if (!std::isfinite(lambda_max)) throw NumericalFailure("cg_fit: non-finite Gram matrix", 0);
    if (budget.verify_psd && !psd_certify(k, lambda_max))
        throw PsdViolation("cg_fit: Gram matrix is not positive semidefinite");

    const std::optional<double> omega = threshold_for(rule, n);
    std::size_t limit = budget.m_max.value_or(n);
    if (const auto* fixed = std::get_if<FixedIterations>(&rule))
        limit = budget.m_max ? std::min(fixed->m, *budget.m_max) : fixed->m;
    // Negative quadratic forms beyond rounding level mean K is indefinite.
    const double curvature_floor = 1e-12 * lambda_max;

    FitResult result;
    result.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd rho = y / nd;
    Eigen::VectorXd z;
    kernels::omp::symv(km, rho, z);

    // z is updated by recurrence, so rho^T z carries absolute drift on the
    // scale of the initial residual form as well as relative rounding.
    double drift_floor = 0.0;
    auto residual_norm = [&](std::size_t iteration) {
        const double rz = rho.dot(z);
        if (!std::isfinite(rz)) throw NumericalFailure("cg_fit: non-finite residual", iteration);
        if (rz < -(curvature_floor * rho.squaredNorm() + drift_floor))
            throw PsdViolation("cg_fit: negative residual form at iteration " + std::to_string(iteration));
        return std::sqrt(std::max(rz, 0.0));
    };

    result.trace.push_back(residual_norm(0));
    drift_floor = 1e-10 * result.trace.front() * result.trace.front();
    if (omega && result.trace.back() <= *omega) {
        result.stop_reason = StopReason::ThresholdMet;
        return result;
    }

    Eigen::VectorXd pi = rho;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double zz = z.squaredNorm();
    std::vector<Direction> history;
    result.stop_reason = StopReason::MaxIterations;

    for (std::size_t step = 0; step < limit; ++step) {
        kernels::omp::symv(km, pi, u);
        if (budget.reorthogonalize) {
            for (const auto& d : history) {
                const double coef = d.v.dot(u) / d.uv;
                pi -= coef * d.pi;
                u -= coef * d.u;
            }
        }
        kernels::omp::symv(km, u, v);
        const double uv = u.dot(v);
        if (!std::isfinite(uv)) throw NumericalFailure("cg_fit: non-finite curvature", step + 1);
        const double guard = budget.degenerate_tol * lambda_max * lambda_max * lambda_max * pi.squaredNorm();
        if (uv < -curvature_floor * lambda_max * lambda_max * pi.squaredNorm())
            throw PsdViolation("cg_fit: negative curvature at iteration " + std::to_string(step + 1));
        if (uv <= guard || zz == 0.0) {
            result.stop_reason = StopReason::KrylovExhausted;
            break;
        }

        const double a = nd * zz / uv;
        result.coeffs += a * pi;
        rho -= (a / nd) * u;
        z -= (a / nd) * v;
        if (!result.coeffs.allFinite()) throw NumericalFailure("cg_fit: non-finite coefficients", step + 1);
        result.trace.push_back(residual_norm(step + 1));
        result.m_star = step + 1;

        if (omega && result.trace.back() <= *omega) {
            result.stop_reason = StopReason::ThresholdMet;
            break;
        }
        if (budget.reorthogonalize) history.push_back({pi, u, v, uv});
        const double zz_next = z.squaredNorm();
        pi = rho + (zz_next / zz) * pi;
        zz = zz_next;
    }
    return result;
}

double residual_hnorm(const GramMatrix& k, const Eigen::VectorXd& y, const Eigen::VectorXd& c) {
    const auto n = static_cast<Eigen::Index>(k.n());
    if (y.size() != n || c.size() != n) throw DimensionMismatch("residual_hnorm: vector lengths do not match K");
    if (n == 0) return 0.0;
    const Eigen::VectorXd d = y - k.entries() * c;
    const double form = d.dot(k.entries() * d);
    const double scale = d.cwiseAbs().dot(k.entries().cwiseAbs() * d.cwiseAbs());
    if (form < -1e-12 * scale) throw PsdViolation("residual_hnorm: negative quadratic form");
    return std::sqrt(std::max(form, 0.0)) / static_cast<double>(n);
}

Eigen::VectorXd oracle_fit(const GramMatrix& k, const Eigen::VectorXd& y, std::size_t m) {
    const std::size_t n = k.n();
    if (n < 1 || n > 32) throw InvalidArgument("oracle_fit: limited to 1 <= n <= 32");
    if (static_cast<std::size_t>(y.size()) != n) throw DimensionMismatch("oracle_fit: y length does not match K");
    if (m > n) throw InvalidArgument("oracle_fit: m must not exceed n");
    const auto rows = static_cast<Eigen::Index>(n);
    const double nd = static_cast<double>(n);
    if (m == 0) return Eigen::VectorXd::Zero(rows);

    const Eigen::MatrixXd a = k.entries() / nd;
    const Eigen::VectorXd b = y / nd;

    // Orthonormal basis of span{A^l b : l < m}, built by repeated application
    // of A with two Gram-Schmidt passes; columns that vanish are dropped.
    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd next = b;
    for (std::size_t l = 0; l < m; ++l) {
        const double before = next.norm();
        if (before == 0.0) break;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) next -= q.dot(next) * q;
        if (next.norm() <= 1e-12 * before) break;
        basis.push_back(next.normalized());
        next = a * basis.back();
    }
    if (basis.empty()) return Eigen::VectorXd::Zero(rows);
    Eigen::MatrixXd v(rows, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t l = 0; l < basis.size(); ++l) v.col(static_cast<Eigen::Index>(l)) = basis[l];

    // |r|_K = |Lambda^{1/2} Q^T r| with K = Q Lambda Q^T.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.entries());
    if (eig.info() != Eigen::Success) throw NumericalFailure("oracle_fit: eigensolver did not converge", 0);
    const Eigen::MatrixXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                                 eig.eigenvectors().transpose();
    const Eigen::MatrixXd design = root * a * v;
    const Eigen::VectorXd rhs = root * b;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * (sv.size() > 0 ? sv[0] : 0.0);
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(design.cols());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) weights += (svd.matrixU().col(i).dot(rhs) / sv[i]) * svd.matrixV().col(i);
    return v * weights;
}

CoefVector predict_beta(const Eigen::MatrixXd& xcoefs, const Eigen::VectorXd& t, const Eigen::VectorXd& c) {
    if (xcoefs.cols() != t.size()) throw DimensionMismatch("predict_beta: X columns do not match eigenvalues");
    if (xcoefs.rows() != c.size()) throw DimensionMismatch("predict_beta: X rows do not match coefficients");
    return CoefVector(t.cwiseProduct(xcoefs.transpose() * c));
}

}  // namespace kcgflr
