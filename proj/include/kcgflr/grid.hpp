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
#include <vector>

#include <Eigen/Dense>

namespace kcgflr {

/// Quadrature grid on S = [0, 1]: strictly increasing points from 0 to 1
/// with nonnegative weights summing to 1.
class Grid {
public:
    Grid(std::vector<double> points, std::vector<double> weights);

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Uniform grid of N points with composite trapezoid weights.
Grid make_uniform_grid(std::size_t num_points);

/// Samples of a function at the points of a grid.
class FunctionOnGrid {
public:
    FunctionOnGrid(Grid grid, Eigen::VectorXd values);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double operator[](std::size_t a) const { return values_[static_cast<Eigen::Index>(a)]; }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

template <typename F>
FunctionOnGrid sample_function(const Grid& grid, F&& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t a = 0; a < grid.size(); ++a) v[static_cast<Eigen::Index>(a)] = f(grid.points()[a]);
    return FunctionOnGrid(grid, std::move(v));
}

double quad_integrate(const FunctionOnGrid& f);

/// Quadrature L2 inner product. Throws DimensionMismatch if the grids differ.
double l2_inner(const FunctionOnGrid& f, const FunctionOnGrid& g);

/// Orthonormal cosine system on [0, 1]: phi_0 = 1, phi_j = sqrt(2) cos(j pi t).
class CosineBasis {
public:
    explicit CosineBasis(std::size_t truncation);

    std::size_t size() const noexcept { return truncation_; }
    double operator()(std::size_t j, double t) const;

private:
    std::size_t truncation_;
};

/// Coordinates with respect to a CosineBasis of matching size.
class CoefVector {
public:
    CoefVector() = default;
    explicit CoefVector(Eigen::VectorXd coeffs);

    std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }
    const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
    double operator[](std::size_t j) const { return coeffs_[static_cast<Eigen::Index>(j)]; }

private:
    Eigen::VectorXd coeffs_;
};

FunctionOnGrid basis_evaluate(const CosineBasis& basis, std::size_t j, const Grid& grid);

/// Synthesis sum_j c_j phi_j on the grid.
FunctionOnGrid coefs_to_grid(const CoefVector& c, const CosineBasis& basis, const Grid& grid);

/// Analysis c_j = <f, phi_j> by quadrature, j < J.
CoefVector grid_to_coefs(const FunctionOnGrid& f, const CosineBasis& basis);

}  // namespace kcgflr
