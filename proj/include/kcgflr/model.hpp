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
#include <optional>

#include <Eigen/Dense>

#include "kcgflr/grid.hpp"
#include "kcgflr/rng.hpp"

namespace kcgflr {

/// Parameters of the simulated functional linear model.
struct ModelParams {
    double s = 0.5;       ///< eigen-decay exponent of T^{1/2} C T^{1/2}, in (0, 1)
    double alpha = 1.0;   ///< source-condition exponent, > 0
    double theta = 0.5;   ///< share of the decay carried by T, in (0, 1)
    std::size_t J = 200;  ///< basis truncation
    double omega = 1.0;   ///< decay of the source element g_j = j^{-omega}, > 1/2
    double sigma = 0.5;   ///< noise standard deviation, >= 0

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Simulation truth. T and C are diagonal in the shared cosine basis, so
/// Lambda = T^{1/2} C T^{1/2} has eigenvalues xi_j = t_j c_j.
struct SpectralModel {
    ModelParams params;
    Eigen::VectorXd t;  ///< eigenvalues of the kernel integral operator T
    Eigen::VectorXd c;  ///< eigenvalues of the covariance operator C
    CoefVector g;       ///< source element

    std::size_t size() const noexcept { return static_cast<std::size_t>(t.size()); }
    Eigen::VectorXd xi() const { return t.cwiseProduct(c); }
};

/// t_j = j^{-theta/s}, c_j = j^{-(1-theta)/s}, g_j = j^{-omega}, j = 1..J.
/// Throws InvalidConfig naming the first parameter out of range.
SpectralModel build_model(const ModelParams& params);

/// beta*_j = t_j^{1/2} (t_j c_j)^alpha g_j.
CoefVector slope_from_source(const SpectralModel& model);

/// One Gaussian covariate: x_j = sqrt(c_j) z_j with z_j iid N(0, 1).
CoefVector sample_X(const SpectralModel& model, const RngSpec& rng);

struct Dataset {
    ModelParams params;
    Eigen::MatrixXd xcoefs;  ///< n x J, row i = coefficients of X_i
    Eigen::VectorXd y;
    std::optional<CoefVector> beta_star;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t n() const noexcept { return static_cast<std::size_t>(xcoefs.rows()); }
    std::size_t J() const noexcept { return static_cast<std::size_t>(xcoefs.cols()); }
};

/// Draws n iid pairs. Row i uses lane 2i+1 of `rng`, its noise lane 2i+2, so
/// the result is a pure function of (model, n, rng.seed, rng.stream).
Dataset sample_dataset(const SpectralModel& model, std::size_t n, const RngSpec& rng);

/// Monte Carlo estimate of E<X,f>^4 / (E<X,f>^2)^2 from M draws (3 for
/// Gaussian X). Small M gives a high-variance estimate.
double fourth_moment_ratio(const SpectralModel& model, const CoefVector& f, std::size_t draws, const RngSpec& rng);

}  // namespace kcgflr
