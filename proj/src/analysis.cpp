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

#include "kcgflr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "kcgflr/error.hpp"

namespace kcgflr {

double l2_error(const CoefVector& beta_hat, const CoefVector& beta_star) {
    if (beta_hat.size() != beta_star.size()) throw DimensionMismatch("l2_error: coefficient lengths differ");
    return (beta_hat.coeffs() - beta_star.coeffs()).norm();
}

double prediction_error(const CoefVector& beta_hat, const CoefVector& beta_star, const Eigen::VectorXd& c) {
    if (beta_hat.size() != beta_star.size() || static_cast<Eigen::Index>(beta_hat.size()) != c.size())
        throw DimensionMismatch("prediction_error: lengths differ");
    return std::sqrt(c.dot((beta_hat.coeffs() - beta_star.coeffs()).cwiseAbs2()));
}

double effective_dimension(const Eigen::VectorXd& xi, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("effective_dimension: lambda must be positive");
    if ((xi.array() < 0.0).any()) throw InvalidArgument("effective_dimension: eigenvalues must be nonnegative");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < xi.size(); ++j) acc += xi[j] / (xi[j] + lambda);
    return acc;
}

double hs_distance_covariance(const Dataset& dataset, const SpectralModel& model) {
    if (dataset.J() != model.size()) throw DimensionMismatch("hs_distance_covariance: dataset J differs from model J");
    if (dataset.n() == 0) throw InvalidArgument("hs_distance_covariance: empty dataset");
    const auto J = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(J, J);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(dataset.xcoefs.transpose(), 1.0 / static_cast<double>(dataset.n()));
    cov.diagonal() -= model.c;
    // Lower triangle holds the result; off-diagonal entries count twice.
    const double diag = cov.diagonal().squaredNorm();
    const double lower = cov.triangularView<Eigen::StrictlyLower>().toDenseMatrix().squaredNorm();
    return std::sqrt(diag + 2.0 * lower);
}

Eigen::VectorXd tikhonov_fit(const GramMatrix& k, const Eigen::VectorXd& y, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("tikhonov_fit: lambda must be positive");
    const auto n = static_cast<Eigen::Index>(k.n());
    if (y.size() != n) throw DimensionMismatch("tikhonov_fit: y length does not match K");
    if (n == 0) return {};
    const double nd = static_cast<double>(n);
    Eigen::MatrixXd system = k.entries() / nd;
    system.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success) throw NumericalFailure("tikhonov_fit: factorization failed", 0);
    Eigen::VectorXd c = ldlt.solve(y / nd);
    if (ldlt.info() != Eigen::Success || !c.allFinite()) throw NumericalFailure("tikhonov_fit: solve failed", 0);
    return c;
}

LogLogFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& errors) {
    if (ns.size() != errors.size()) throw InvalidArgument("fit_loglog_slope: lengths differ");
    if (ns.size() < 2) throw InvalidArgument("fit_loglog_slope: need at least two points");
    const auto count = static_cast<double>(ns.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0) || !(errors[i] > 0.0))
            throw InvalidArgument("fit_loglog_slope: inputs must be positive");
        mx += std::log(ns[i]);
        my += std::log(errors[i]);
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double dx = std::log(ns[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[i]) - my);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_loglog_slope: sample sizes must not all be equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

void validate(const RateConfig& config) {
    build_model(config.model);
    if (!(config.tau > 0.0) || !std::isfinite(config.tau)) throw InvalidConfig("tau", "must be positive");
    if (config.replications < 1) throw InvalidConfig("replications", "must be >= 1");
    if (config.n_grid.empty()) throw InvalidConfig("n_grid", "must not be empty");
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        if (config.n_grid[i] < 8) throw InvalidConfig("n_grid", "every sample size must be >= 8");
        if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
            throw InvalidConfig("n_grid", "sample sizes must be strictly increasing");
    }
}

RateRecord run_rate_cell(const RateConfig& config, const SpectralModel& model, std::size_t n, std::size_t rep) {
    RateRecord record;
    record.n = n;
    record.rep = rep;
    record.seed = config.seed;
    const auto& p = config.model;
    record.omega = omega_threshold(config.tau, p.alpha, p.s, n);
    const RngSpec rng{config.seed, cell_stream(n, rep), 0};
    try {
        const Dataset data = sample_dataset(model, n, rng);
        const GramMatrix k = gram_spectral(data.xcoefs, model.t);
        IterationBudget budget;
        budget.verify_psd = config.verify_psd;
        const FitResult fit = cg_fit(k, data.y, TheoremSchedule{config.tau, p.alpha, p.s}, budget);
        const CoefVector beta_hat = predict_beta(data.xcoefs, model.t, fit.coeffs);
        record.m_star = fit.m_star;
        record.l2_error = l2_error(beta_hat, *data.beta_star);
        record.pred_error = prediction_error(beta_hat, *data.beta_star, model.c);
        record.stop_reason = std::string(to_string(fit.stop_reason));
    } catch (const PsdViolation&) {
        record.stop_reason = "psd-violation";
    } catch (const NumericalFailure&) {
        record.stop_reason = "numerical-failure";
    } catch (const Error&) {
        record.stop_reason = "error";
    }
    if (!parse_stop_reason(record.stop_reason)) {
        record.l2_error = std::numeric_limits<double>::quiet_NaN();
        record.pred_error = std::numeric_limits<double>::quiet_NaN();
    }
    return record;
}

RateResult run_rate_experiment(const RateConfig& config, int threads) {
    validate(config);
    const SpectralModel model = build_model(config.model);
    const std::size_t reps = config.replications;
    const std::size_t cells = config.n_grid.size() * reps;

    RateResult result;
    result.records.resize(cells);
    const int team = threads > 0 ? threads : omp_get_max_threads();
    // Largest n first so the expensive cells are scheduled early.
    const auto total = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
    for (std::ptrdiff_t idx = total - 1; idx >= 0; --idx) {
        const auto cell = static_cast<std::size_t>(idx);
        const std::size_t n = config.n_grid[cell / reps];
        result.records[cell] = run_rate_cell(config, model, n, cell % reps);
    }

    std::vector<double> ns;
    std::vector<double> medians;
    for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
        RateSummary summary;
        summary.n = config.n_grid[g];
        std::vector<double> errors;
        std::vector<double> iterations;
        for (std::size_t r = 0; r < reps; ++r) {
            const RateRecord& rec = result.records[g * reps + r];
            if (!parse_stop_reason(rec.stop_reason)) {
                ++summary.failures;
                continue;
            }
            errors.push_back(rec.l2_error);
            iterations.push_back(static_cast<double>(rec.m_star));
            summary.max_m_star = std::max(summary.max_m_star, rec.m_star);
        }
        summary.median_l2_error = median(errors);
        summary.median_m_star = median(iterations);
        result.per_n.push_back(summary);
        if (std::isfinite(summary.median_l2_error) && summary.median_l2_error > 0.0) {
            ns.push_back(static_cast<double>(summary.n));
            medians.push_back(summary.median_l2_error);
        }
    }
    const auto& p = config.model;
    result.expected_slope = -p.alpha / (1.0 + p.s + 2.0 * p.alpha);
    if (ns.size() >= 2) {
        result.fit = fit_loglog_slope(ns, medians);
    } else {
        result.fit = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    return result;
}

}  // namespace kcgflr
