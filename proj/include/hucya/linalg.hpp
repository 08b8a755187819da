// SPDX-License-Identifier: Apache-2.0
//
// hucya: wideband channel-parameter estimation for hybrid cylindrical arrays
// Copyright (C) 2026 The hucya authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HUCYA_LINALG_HPP
#define HUCYA_LINALG_HPP

#include "hucya/common.hpp"

#include <vector>

namespace hucya
{
    // Total-least-squares solution of A X = B (both K x n, K >= n) from the SVD of [A B]:
    // X = -V12 V22^{-1}. Falls back to least squares when V22 is singular.
    // Throws numerical_error when A is rank deficient.
    CMat tls_solve(const CMat &a, const CMat &b, bool *used_fallback = nullptr);

    // Minimum-cost perfect matching on a square cost matrix; result[row] = column
    std::vector<std::size_t> optimal_assignment(const RMat &cost);

    // Largest principal angle between the column spans of a and b (radians)
    double principal_angle(const CMat &a, const CMat &b);

    // Orthonormal basis for the column span (thin QR)
    CMat orthonormal_basis(const CMat &a);

    // Phase of sum_k z_k / |z_k|
    double circular_mean_phase(const std::vector<cplx> &z);

    // Eigen-decomposition of a small general complex matrix; throws numerical_error on failure
    struct EigenPair
    {
        CVec values;
        CMat vectors; // unit-norm columns
    };
    EigenPair eigen_general(const CMat &m);

    // 2-norm condition number from singular values (inf for singular input)
    double condition_number(const CMat &m);
}

#endif
