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

#include "hucya/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace hucya
{
    CMat tls_solve(const CMat &a, const CMat &b, bool *used_fallback)
    {
        const Eigen::Index n = a.cols();
        if (b.cols() != n || b.rows() != a.rows() || a.rows() < n || n == 0)
            throw std::invalid_argument("tls_solve: A and B must be K x n with K >= n");
        if (used_fallback)
            *used_fallback = false;

        Eigen::JacobiSVD<CMat> sa(a);
        const RVec sv = sa.singularValues();
        if (sv[0] == 0.0 || sv[n - 1] < 1e-12 * sv[0])
            throw numerical_error("tls_solve: rank-deficient subspace block");

        CMat c(a.rows(), 2 * n);
        c << a, b;
        Eigen::JacobiSVD<CMat> svd(c, Eigen::ComputeThinV);
        const CMat &v = svd.matrixV();
        const CMat v12 = v.block(0, n, n, n);
        const CMat v22 = v.block(n, n, n, n);
        Eigen::FullPivLU<CMat> lu(v22);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible())
        {
            if (used_fallback)
                *used_fallback = true;
            return a.colPivHouseholderQr().solve(b);
        }
        return -v12 * lu.inverse();
    }

    std::vector<std::size_t> optimal_assignment(const RMat &cost)
    {
        // Hungarian method with potentials, O(n^3)
        const auto n = static_cast<std::size_t>(cost.rows());
        if (cost.cols() != cost.rows())
            throw std::invalid_argument("optimal_assignment: cost matrix must be square");
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
        std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
        std::vector<bool> used(n + 1);

        for (std::size_t i = 1; i <= n; ++i)
        {
            p[0] = i;
            std::size_t j0 = 0;
            std::fill(minv.begin(), minv.end(), inf);
            std::fill(used.begin(), used.end(), false);
            do
            {
                used[j0] = true;
                const std::size_t i0 = p[j0];
                double delta = inf;
                std::size_t j1 = 0;
                for (std::size_t j = 1; j <= n; ++j)
                    if (!used[j])
                    {
                        const double cur = cost(Eigen::Index(i0 - 1), Eigen::Index(j - 1)) - u[i0] - v[j];
                        if (cur < minv[j])
                            minv[j] = cur, way[j] = j0;
                        if (minv[j] < delta)
                            delta = minv[j], j1 = j;
                    }
                for (std::size_t j = 0; j <= n; ++j)
                    if (used[j])
                        u[p[j]] += delta, v[j] -= delta;
                    else
                        minv[j] -= delta;
                j0 = j1;
            } while (p[j0] != 0);
            do
            {
                const std::size_t j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0 != 0);
        }

        std::vector<std::size_t> result(n);
        for (std::size_t j = 1; j <= n; ++j)
            result[p[j] - 1] = j - 1;
        return result;
    }

    CMat orthonormal_basis(const CMat &a)
    {
        Eigen::HouseholderQR<CMat> qr(a);
        return qr.householderQ() * CMat::Identity(a.rows(), a.cols());
    }

    double principal_angle(const CMat &a, const CMat &b)
    {
        if (a.rows() != b.rows())
            throw std::invalid_argument("principal_angle: row mismatch");
        const CMat qa = orthonormal_basis(a), qb = orthonormal_basis(b);
        Eigen::JacobiSVD<CMat> svd(qa.adjoint() * qb);
        const double smin = svd.singularValues().minCoeff();
        return std::acos(std::clamp(smin, 0.0, 1.0));
    }

    double circular_mean_phase(const std::vector<cplx> &z)
    {
        cplx s = 0.0;
        for (const auto &v : z)
            if (std::abs(v) > 0.0)
                s += v / std::abs(v);
        return std::arg(s);
    }

    EigenPair eigen_general(const CMat &m)
    {
        Eigen::ComplexEigenSolver<CMat> es(m);
        if (es.info() != Eigen::Success)
            throw numerical_error("eigen_general: eigenvalue iteration did not converge");
        EigenPair out{es.eigenvalues(), es.eigenvectors()};
        for (Eigen::Index k = 0; k < out.vectors.cols(); ++k)
        {
            const double nrm = out.vectors.col(k).norm();
            if (nrm > 0.0)
                out.vectors.col(k) /= nrm;
        }
        return out;
    }

    double condition_number(const CMat &m)
    {
        Eigen::JacobiSVD<CMat> svd(m);
        const RVec s = svd.singularValues();
        if (s.size() == 0 || s[s.size() - 1] == 0.0)
            return std::numeric_limits<double>::infinity();
        return s[0] / s[s.size() - 1];
    }
}
