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

#include "kcgflr/model.hpp"

#include <cmath>
#include <string>

#include "kcgflr/error.hpp"

namespace kcgflr {

namespace {

Eigen::VectorXd draw_coefs(const SpectralModel& model, NormalStream& normals) {
    Eigen::VectorXd x(model.t.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = std::sqrt(model.c[j]) * normals.normal();
    return x;
}

}  // namespace

SpectralModel build_model(const ModelParams& p) {
    if (!(p.s > 0.0 && p.s < 1.0)) throw InvalidConfig("s", "must lie in (0, 1), got " + std::to_string(p.s));
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
        throw InvalidConfig("alpha", "must be positive, got " + std::to_string(p.alpha));
    if (!(p.theta > 0.0 && p.theta < 1.0))
        throw InvalidConfig("theta", "must lie in (0, 1), got " + std::to_string(p.theta));
    if (p.J < 1) throw InvalidConfig("J", "must be >= 1");
    if (!(p.omega > 0.5) || !std::isfinite(p.omega))
        throw InvalidConfig("omega", "must exceed 1/2, got " + std::to_string(p.omega));
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
        throw InvalidConfig("sigma", "must be >= 0, got " + std::to_string(p.sigma));

    const auto J = static_cast<Eigen::Index>(p.J);
    SpectralModel m;
    m.params = p;
    m.t.resize(J);
    m.c.resize(J);
    Eigen::VectorXd g(J);
    for (Eigen::Index k = 0; k < J; ++k) {
        const double j = static_cast<double>(k + 1);
        m.t[k] = std::pow(j, -p.theta / p.s);
        m.c[k] = std::pow(j, -(1.0 - p.theta) / p.s);
        g[k] = std::pow(j, -p.omega);
    }
    m.g = CoefVector(std::move(g));
    return m;
}

CoefVector slope_from_source(const SpectralModel& model) {
    const double alpha = model.params.alpha;
    Eigen::VectorXd beta(model.t.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        beta[j] = std::sqrt(model.t[j]) * std::pow(model.t[j] * model.c[j], alpha) * model.g.coeffs()[j];
    return CoefVector(std::move(beta));
}

CoefVector sample_X(const SpectralModel& model, const RngSpec& rng) {
    NormalStream normals(rng);
    return CoefVector(draw_coefs(model, normals));
}

Dataset sample_dataset(const SpectralModel& model, std::size_t n, const RngSpec& rng) {
    if (n == 0) throw InvalidArgument("sample_dataset: n must be >= 1");
    const auto rows = static_cast<Eigen::Index>(n);
    CoefVector beta = slope_from_source(model);

    Dataset d;
    d.params = model.params;
    d.params.J = model.size();
    d.seed = rng.seed;
    d.stream = rng.stream;
    d.xcoefs.resize(rows, model.t.size());
    d.y.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto lane = 2 * static_cast<std::uint64_t>(i);
        d.xcoefs.row(i) = sample_X(model, rng.with_lane(lane + 1)).coeffs().transpose();
        d.y[i] = d.xcoefs.row(i).dot(beta.coeffs());
        if (model.params.sigma > 0.0) d.y[i] += model.params.sigma * NormalStream(rng.with_lane(lane + 2)).normal();
    }
    d.beta_star = std::move(beta);
    return d;
}

double fourth_moment_ratio(const SpectralModel& model, const CoefVector& f, std::size_t draws, const RngSpec& rng) {
    if (f.size() != model.size()) throw DimensionMismatch("fourth_moment_ratio: direction length does not match J");
    if (draws < 1) throw InvalidArgument("fourth_moment_ratio: need at least one draw");
    const double variance = model.c.dot(f.coeffs().cwiseAbs2());
    if (!(variance > 0.0)) throw DegenerateDirection("fourth_moment_ratio: E<X,f>^2 = 0 for this direction");

    NormalStream normals(rng);
    double m2 = 0.0;
    double m4 = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        const double proj = draw_coefs(model, normals).dot(f.coeffs());
        const double sq = proj * proj;
        m2 += sq;
        m4 += sq * sq;
    }
    const double count = static_cast<double>(draws);
    m2 /= count;
    m4 /= count;
    return m4 / (m2 * m2);
}

}  // namespace kcgflr
