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

// AVX2 + FMA variants. This translation unit is compiled with per-function target attributes so
// the rest of the library stays baseline x86-64; callers reach it only through the dispatch table.

#include "hucya/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define HUCYA_HAVE_X86 1
#define HUCYA_AVX2 __attribute__((target("avx2,fma")))
#else
#define HUCYA_HAVE_X86 0
#endif

namespace hucya::kernels
{
#if HUCYA_HAVE_X86
    namespace
    {
        // One __m256d holds two complex doubles laid out as [re0, im0, re1, im1]

        HUCYA_AVX2 inline double hsum(__m256d v)
        {
            __m128d lo = _mm256_castpd256_pd128(v);
            __m128d hi = _mm256_extractf128_pd(v, 1);
            lo = _mm_add_pd(lo, hi);
            return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
        }

        HUCYA_AVX2 cplx dotc_avx2(const cplx *a, const cplx *b, std::size_t n)
        {
            const double *pa = reinterpret_cast<const double *>(a);
            const double *pb = reinterpret_cast<const double *>(b);

            // acc_same collects [ar*br, ai*bi], acc_swap collects [ar*bi, ai*br]
            __m256d acc_same0 = _mm256_setzero_pd(), acc_swap0 = _mm256_setzero_pd();
            __m256d acc_same1 = _mm256_setzero_pd(), acc_swap1 = _mm256_setzero_pd();

            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                const __m256d va0 = _mm256_loadu_pd(pa + 2 * i);
                const __m256d vb0 = _mm256_loadu_pd(pb + 2 * i);
                const __m256d va1 = _mm256_loadu_pd(pa + 2 * i + 4);
                const __m256d vb1 = _mm256_loadu_pd(pb + 2 * i + 4);
                acc_same0 = _mm256_fmadd_pd(va0, vb0, acc_same0);
                acc_swap0 = _mm256_fmadd_pd(va0, _mm256_permute_pd(vb0, 0b0101), acc_swap0);
                acc_same1 = _mm256_fmadd_pd(va1, vb1, acc_same1);
                acc_swap1 = _mm256_fmadd_pd(va1, _mm256_permute_pd(vb1, 0b0101), acc_swap1);
            }
            for (; i + 2 <= n; i += 2)
            {
                const __m256d va = _mm256_loadu_pd(pa + 2 * i);
                const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
                acc_same0 = _mm256_fmadd_pd(va, vb, acc_same0);
                acc_swap0 = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_swap0);
            }
            acc_same0 = _mm256_add_pd(acc_same0, acc_same1);
            acc_swap0 = _mm256_add_pd(acc_swap0, acc_swap1);

            double re = hsum(acc_same0);
            // imaginary part: sum of ar*bi (even lanes) minus ai*br (odd lanes)
            const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
            double im = hsum(_mm256_mul_pd(acc_swap0, sign));

            for (; i < n; ++i)
            {
                re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
                im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
            }
            return {re, im};
        }

        HUCYA_AVX2 void axpy_avx2(cplx alpha, const cplx *x, cplx *y, std::size_t n)
        {
            const double *px = reinterpret_cast<const double *>(x);
            double *py = reinterpret_cast<double *>(y);
            const __m256d ar = _mm256_set1_pd(alpha.real());
            const __m256d ai = _mm256_set1_pd(alpha.imag());

            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const __m256d vx = _mm256_loadu_pd(px + 2 * i);
                const __m256d vy = _mm256_loadu_pd(py + 2 * i);
                const __m256d t = _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0b0101)); // [ai*xi, ai*xr]
                const __m256d prod = _mm256_fmaddsub_pd(ar, vx, t);                  // [ar*xr - ai*xi, ar*xi + ai*xr]
                _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, prod));
            }
            for (; i < n; ++i)
            {
                const double xr = x[i].real(), xi = x[i].imag();
                y[i] = cplx(y[i].real() + alpha.real() * xr - alpha.imag() * xi,
                            y[i].imag() + alpha.real() * xi + alpha.imag() * xr);
            }
        }

        HUCYA_AVX2 double norm2_avx2(const cplx *a, std::size_t n)
        {
            const double *pa = reinterpret_cast<const double *>(a);
            __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                const __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
                const __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
                acc0 = _mm256_fmadd_pd(v0, v0, acc0);
                acc1 = _mm256_fmadd_pd(v1, v1, acc1);
            }
            for (; i + 2 <= n; i += 2)
            {
                const __m256d v = _mm256_loadu_pd(pa + 2 * i);
                acc0 = _mm256_fmadd_pd(v, v, acc0);
            }
            double s = hsum(_mm256_add_pd(acc0, acc1));
            for (; i < n; ++i)
                s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
            return s;
        }

        HUCYA_AVX2 void gemv_h_avx2(const cplx *w, std::size_t rows, std::size_t cols, const cplx *x, cplx *y)
        {
            for (std::size_t c = 0; c < cols; ++c)
                y[c] = dotc_avx2(w + c * rows, x, rows);
        }

        HUCYA_AVX2 void rank1_update_avx2(cplx *r, std::size_t n, const cplx *v, double scale)
        {
            for (std::size_t c = 0; c < n; ++c)
                axpy_avx2(scale * std::conj(v[c]), v, r + c * n, n);
        }
    }

    const KernelTable &avx2_table()
    {
        static const KernelTable table{dotc_avx2, axpy_avx2, norm2_avx2, gemv_h_avx2, rank1_update_avx2};
        return table;
    }

    bool avx2_compiled() { return true; }
#else
    const KernelTable &avx2_table() { return scalar_table(); }
    bool avx2_compiled() { return false; }
#endif
}
