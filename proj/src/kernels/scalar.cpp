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

#include "hucya/kernels.hpp"

namespace hucya::kernels
{
    namespace
    {
        cplx dotc_scalar(const cplx *a, const cplx *b, std::size_t n)
        {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double ar = a[i].real(), ai = a[i].imag();
                const double br = b[i].real(), bi = b[i].imag();
                re += ar * br + ai * bi;
                im += ar * bi - ai * br;
            }
            return {re, im};
        }

        void axpy_scalar(cplx alpha, const cplx *x, cplx *y, std::size_t n)
        {
            const double pr = alpha.real(), pi = alpha.imag();
            for (std::size_t i = 0; i < n; ++i)
            {
                const double xr = x[i].real(), xi = x[i].imag();
                y[i] = cplx(y[i].real() + pr * xr - pi * xi, y[i].imag() + pr * xi + pi * xr);
            }
        }

        double norm2_scalar(const cplx *a, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
            return s;
        }

        void gemv_h_scalar(const cplx *w, std::size_t rows, std::size_t cols, const cplx *x, cplx *y)
        {
            for (std::size_t c = 0; c < cols; ++c)
                y[c] = dotc_scalar(w + c * rows, x, rows);
        }

        void rank1_update_scalar(cplx *r, std::size_t n, const cplx *v, double scale)
        {
            for (std::size_t c = 0; c < n; ++c)
                axpy_scalar(scale * std::conj(v[c]), v, r + c * n, n);
        }
    }

    const KernelTable &scalar_table()
    {
        static const KernelTable table{dotc_scalar, axpy_scalar, norm2_scalar, gemv_h_scalar, rank1_update_scalar};
        return table;
    }
}
