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

#include <Eigen/Dense>

// Dense inner loops of the library. Each kernel has a serial reference and an
// OpenMP version that parallelizes over output rows. Every output entry is
// computed by the same sequential reduction in both, so results agree bitwise
// for any thread count.
namespace kcgflr::kernels {

namespace serial {

/// K_ij = sum_k t_k x_ik x_jk, lower triangle computed and mirrored.
Eigen::MatrixXd gram_spectral(const Eigen::MatrixXd& x, const Eigen::VectorXd& t);

/// K = A Kg A^T with A = X W (rows of `weighted` are the weighted samples).
Eigen::MatrixXd congruence(const Eigen::MatrixXd& weighted, const Eigen::MatrixXd& kernel_matrix);

/// out = K v for symmetric K (row i read as column i).
void symv(const Eigen::MatrixXd& k, const Eigen::VectorXd& v, Eigen::VectorXd& out);

}  // namespace serial

namespace omp {

Eigen::MatrixXd gram_spectral(const Eigen::MatrixXd& x, const Eigen::VectorXd& t);
Eigen::MatrixXd congruence(const Eigen::MatrixXd& weighted, const Eigen::MatrixXd& kernel_matrix);
void symv(const Eigen::MatrixXd& k, const Eigen::VectorXd& v, Eigen::VectorXd& out);

}  // namespace omp

}  // namespace kcgflr::kernels
