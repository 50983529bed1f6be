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

#include "kcgflr/grid.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kcgflr/error.hpp"

namespace kcgflr {

Grid::Grid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() < 2) throw InvalidArgument("grid needs at least 2 points");
    if (points_.size() != weights_.size())
        throw DimensionMismatch("grid points and weights differ in length");
    if (points_.front() != 0.0 || points_.back() != 1.0)
        throw InvalidArgument("grid must start at 0 and end at 1");
    for (std::size_t a = 1; a < points_.size(); ++a)
        if (!(points_[a] > points_[a - 1])) throw InvalidArgument("grid points must be strictly increasing");
    for (double w : weights_)
        if (!(w >= 0.0)) throw InvalidArgument("grid weights must be nonnegative");
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("grid weights must sum to 1");
}

Grid make_uniform_grid(std::size_t num_points) {
    if (num_points < 2) throw InvalidArgument("uniform grid needs N >= 2, got " + std::to_string(num_points));
    const double h = 1.0 / static_cast<double>(num_points - 1);
    std::vector<double> points(num_points);
    std::vector<double> weights(num_points, h);
    for (std::size_t a = 0; a < num_points; ++a) points[a] = static_cast<double>(a) * h;
    points.back() = 1.0;
    weights.front() = weights.back() = 0.5 * h;
    return Grid(std::move(points), std::move(weights));
}

FunctionOnGrid::FunctionOnGrid(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size())
        throw DimensionMismatch("function values do not match grid length");
    if (!values_.allFinite()) throw InvalidArgument("function values must be finite");
}

double quad_integrate(const FunctionOnGrid& f) {
    const auto& w = f.grid().weights();
    double acc = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) acc += w[a] * f[a];
    return acc;
}

double l2_inner(const FunctionOnGrid& f, const FunctionOnGrid& g) {
    if (!(f.grid() == g.grid())) throw DimensionMismatch("l2_inner: functions live on different grids");
    const auto& w = f.grid().weights();
    double acc = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) acc += w[a] * f[a] * g[a];
    return acc;
}

CosineBasis::CosineBasis(std::size_t truncation) : truncation_(truncation) {
    if (truncation_ < 1) throw InvalidArgument("cosine basis truncation must be >= 1");
}

double CosineBasis::operator()(std::size_t j, double t) const {
    if (j >= truncation_)
        throw IndexError("basis index " + std::to_string(j) + " out of range [0, " +
                         std::to_string(truncation_) + ")");
    if (j == 0) return 1.0;
    return std::numbers::sqrt2 * std::cos(static_cast<double>(j) * std::numbers::pi * t);
}

CoefVector::CoefVector(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) {
    if (!coeffs_.allFinite()) throw InvalidArgument("coefficients must be finite");
}

FunctionOnGrid basis_evaluate(const CosineBasis& basis, std::size_t j, const Grid& grid) {
    if (j >= basis.size())
        throw IndexError("basis index " + std::to_string(j) + " out of range [0, " +
                         std::to_string(basis.size()) + ")");
    return sample_function(grid, [&](double t) { return basis(j, t); });
}

FunctionOnGrid coefs_to_grid(const CoefVector& c, const CosineBasis& basis, const Grid& grid) {
    if (c.size() != basis.size()) throw DimensionMismatch("coefficient length does not match basis size");
    return sample_function(grid, [&](double t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) acc += c[j] * basis(j, t);
        return acc;
    });
}

CoefVector grid_to_coefs(const FunctionOnGrid& f, const CosineBasis& basis) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        c[static_cast<Eigen::Index>(j)] = l2_inner(f, basis_evaluate(basis, j, f.grid()));
    return CoefVector(std::move(c));
}

}  // namespace kcgflr
