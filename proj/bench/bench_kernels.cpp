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

// Serial reference vs OpenMP kernels, plus end-to-end CG fits.

#include <benchmark/benchmark.h>

#include "kcgflr/cg.hpp"
#include "kcgflr/gram.hpp"
#include "kcgflr/kernels.hpp"
#include "kcgflr/model.hpp"

namespace {

using namespace kcgflr;

Dataset bench_data(std::size_t n, std::size_t J = 200) {
    ModelParams p;
    p.J = J;
    return sample_dataset(build_model(p), n, RngSpec{7, n, 0});
}

template <Eigen::MatrixXd (*Gram)(const Eigen::MatrixXd&, const Eigen::VectorXd&)>
void BM_GramSpectral(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)));
    const Eigen::VectorXd t = build_model(d.params).t;
    for (auto _ : state) benchmark::DoNotOptimize(Gram(d.xcoefs, t));
    state.SetComplexityN(state.range(0));
}
BENCHMARK_TEMPLATE(BM_GramSpectral, kernels::serial::gram_spectral)->RangeMultiplier(2)->Range(128, 2048);
BENCHMARK_TEMPLATE(BM_GramSpectral, kernels::omp::gram_spectral)->RangeMultiplier(2)->Range(128, 2048);

template <void (*Symv)(const Eigen::MatrixXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>
void BM_Symv(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd k = a * a.transpose();
    const Eigen::VectorXd v = Eigen::VectorXd::Random(n);
    Eigen::VectorXd out(n);
    for (auto _ : state) {
        Symv(k, v, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK_TEMPLATE(BM_Symv, kernels::serial::symv)->RangeMultiplier(2)->Range(128, 2048);
BENCHMARK_TEMPLATE(BM_Symv, kernels::omp::symv)->RangeMultiplier(2)->Range(128, 2048);

template <Eigen::MatrixXd (*Congruence)(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>
void BM_Congruence(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Eigen::MatrixXd weighted = Eigen::MatrixXd::Random(n, 201);
    const Eigen::MatrixXd kg = kernel_matrix(BrownianKernel{}, make_uniform_grid(201));
    for (auto _ : state) benchmark::DoNotOptimize(Congruence(weighted, kg));
}
BENCHMARK_TEMPLATE(BM_Congruence, kernels::serial::congruence)->RangeMultiplier(4)->Range(128, 2048);
BENCHMARK_TEMPLATE(BM_Congruence, kernels::omp::congruence)->RangeMultiplier(4)->Range(128, 2048);

void BM_CgFitSchedule(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)));
    const GramMatrix k = gram_spectral(d.xcoefs, build_model(d.params).t);
    const TheoremSchedule rule{1.0, d.params.alpha, d.params.s};
    for (auto _ : state) benchmark::DoNotOptimize(cg_fit(k, d.y, rule));
}
BENCHMARK(BM_CgFitSchedule)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
