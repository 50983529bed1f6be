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

#include "kcgflr/kernels.hpp"

namespace kcgflr::kernels {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sequential dot product; fixed summation order is what makes the serial and
// parallel kernels agree bitwise.
inline double dot_rows(const double* a, const double* b, Eigen::Index len) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < len; ++k) acc += a[k] * b[k];
    return acc;
}

inline void gram_row(const RowMajor& scaled, const RowMajor& rows, Eigen::Index i, Eigen::MatrixXd& out) {
    const Eigen::Index len = rows.cols();
    for (Eigen::Index j = 0; j <= i; ++j) out(i, j) = dot_rows(scaled.row(i).data(), rows.row(j).data(), len);
}

inline void mirror_lower(Eigen::MatrixXd& k) {
    for (Eigen::Index j = 0; j < k.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) k(i, j) = k(j, i);
}

inline void congruence_row(const RowMajor& weighted, const RowMajor& projected, Eigen::Index i, Eigen::MatrixXd& out) {
    const Eigen::Index len = weighted.cols();
    for (Eigen::Index j = 0; j < weighted.rows(); ++j)
        out(i, j) = dot_rows(projected.row(i).data(), weighted.row(j).data(), len);
}

inline void project_row(const RowMajor& weighted, const Eigen::MatrixXd& kg, Eigen::Index i, RowMajor& projected) {
    // projected_i = weighted_i * Kg
    const Eigen::Index len = weighted.cols();
    for (Eigen::Index b = 0; b < kg.cols(); ++b) projected(i, b) = dot_rows(weighted.row(i).data(), kg.col(b).data(), len);
}

}  // namespace

namespace serial {

Eigen::MatrixXd gram_spectral(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
    const RowMajor rows = x;
    const RowMajor scaled = x * t.asDiagonal();
    Eigen::MatrixXd k(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) gram_row(scaled, rows, i, k);
    mirror_lower(k);
    return k;
}

Eigen::MatrixXd congruence(const Eigen::MatrixXd& weighted, const Eigen::MatrixXd& kernel_matrix) {
    const RowMajor w = weighted;
    RowMajor projected(w.rows(), kernel_matrix.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) project_row(w, kernel_matrix, i, projected);
    Eigen::MatrixXd k(w.rows(), w.rows());
    for (Eigen::Index i = 0; i < w.rows(); ++i) congruence_row(w, projected, i, k);
    return k;
}

void symv(const Eigen::MatrixXd& k, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(k.rows());
    for (Eigen::Index i = 0; i < k.rows(); ++i) out[i] = dot_rows(k.col(i).data(), v.data(), v.size());
}

}  // namespace serial

namespace omp {

Eigen::MatrixXd gram_spectral(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
    const RowMajor rows = x;
    const RowMajor scaled = x * t.asDiagonal();
    Eigen::MatrixXd k(x.rows(), x.rows());
    const Eigen::Index n = x.rows();
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) gram_row(scaled, rows, i, k);
    mirror_lower(k);
    return k;
}

Eigen::MatrixXd congruence(const Eigen::MatrixXd& weighted, const Eigen::MatrixXd& kernel_matrix) {
    const RowMajor w = weighted;
    const Eigen::Index n = w.rows();
    RowMajor projected(n, kernel_matrix.cols());
    Eigen::MatrixXd k(n, n);
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) project_row(w, kernel_matrix, i, projected);
#pragma omp for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) congruence_row(w, projected, i, k);
    }
    return k;
}

void symv(const Eigen::MatrixXd& k, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(k.rows());
    const Eigen::Index n = k.rows();
#pragma omp parallel for schedule(static) if (n >= 256)
    for (Eigen::Index i = 0; i < n; ++i) out[i] = dot_rows(k.col(i).data(), v.data(), v.size());
}

}  // namespace omp

}  // namespace kcgflr::kernels
