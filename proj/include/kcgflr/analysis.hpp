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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kcgflr/cg.hpp"
#include "kcgflr/gram.hpp"
#include "kcgflr/grid.hpp"
#include "kcgflr/model.hpp"

namespace kcgflr {

/// L2 estimation error; Parseval in the orthonormal basis.
double l2_error(const CoefVector& beta_hat, const CoefVector& beta_star);

/// Prediction error |C^{1/2}(beta_hat - beta*)| for covariance eigenvalues c.
double prediction_error(const CoefVector& beta_hat, const CoefVector& beta_star, const Eigen::VectorXd& c);

/// N(lambda) = sum_j xi_j / (xi_j + lambda).
double effective_dimension(const Eigen::VectorXd& xi, double lambda);

/// Frobenius distance between the empirical covariance (1/n) sum x_i x_i^T
/// and diag(c), in the J-dimensional truncation.
double hs_distance_covariance(const Dataset& dataset, const SpectralModel& model);

/// Ridge baseline c = (K/n + lambda I)^{-1} (y/n).
Eigen::VectorXd tikhonov_fit(const GramMatrix& k, const Eigen::VectorXd& y, double lambda);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares of log(error) on log(n).
LogLogFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& errors);

double median(std::vector<double> values);

struct RateConfig {
    ModelParams model;
    double tau = 1.0;
    std::vector<std::size_t> n_grid{128, 256, 512, 1024, 2048};
    std::size_t replications = 50;
    std::uint64_t seed = 20240601;
    bool verify_psd = true;
};

/// Throws InvalidConfig naming the offending field.
void validate(const RateConfig& config);

struct RateRecord {
    std::size_t n = 0;
    std::size_t rep = 0;
    std::size_t m_star = 0;
    double l2_error = 0.0;
    double pred_error = 0.0;
    double omega = 0.0;
    std::string stop_reason;  ///< a StopReason name, or "psd-violation" / "numerical-failure" / "error"
    std::uint64_t seed = 0;
};

struct RateSummary {
    std::size_t n = 0;
    double median_l2_error = 0.0;
    double median_m_star = 0.0;
    std::size_t max_m_star = 0;
    std::size_t failures = 0;
};

struct RateResult {
    std::vector<RateRecord> records;  ///< sorted by (n, rep)
    std::vector<RateSummary> per_n;
    LogLogFit fit;
    double expected_slope = 0.0;  ///< -alpha / (1 + s + 2 alpha)
};

/// One replication cell: dataset from stream cell_stream(n, rep), spectral
/// Gram matrix, CG with the schedule threshold. Solver failures are recorded,
/// not thrown.
RateRecord run_rate_cell(const RateConfig& config, const SpectralModel& model, std::size_t n, std::size_t rep);

/// Full sweep. Cells run in parallel over `threads` OpenMP threads (0 keeps
/// the runtime default); the result does not depend on the thread count.
RateResult run_rate_experiment(const RateConfig& config, int threads = 0);

}  // namespace kcgflr
