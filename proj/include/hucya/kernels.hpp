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

#ifndef HUCYA_KERNELS_HPP
#define HUCYA_KERNELS_HPP

// Complex double-precision inner loops used by the beamformer, covariance and MUSIC stages.
// Every kernel has a scalar reference implementation and an AVX2/FMA variant; the variant is
// selected once at runtime from the CPU feature flags. All matrices are column-major.

#include "hucya/common.hpp"

#include <cstddef>
#include <span>
#include <string_view>

namespace hucya::kernels
{
    enum class Isa
    {
        scalar,
        avx2
    };

    struct KernelTable
    {
        // sum_i conj(a[i]) * b[i]
        cplx (*dotc)(const cplx *a, const cplx *b, std::size_t n);

        // y[i] += alpha * x[i]
        void (*axpy)(cplx alpha, const cplx *x, cplx *y, std::size_t n);

        // sum_i |a[i]|^2
        double (*norm2)(const cplx *a, std::size_t n);

        // y = W^H x, W is rows x cols (column-major), x has rows entries, y has cols entries
        void (*gemv_h)(const cplx *w, std::size_t rows, std::size_t cols, const cplx *x, cplx *y);

        // R += scale * v v^H on the full n x n column-major matrix R
        void (*rank1_update)(cplx *r, std::size_t n, const cplx *v, double scale);
    };

    const KernelTable &scalar_table();
    const KernelTable &avx2_table(); // only valid when cpu_supports(Isa::avx2)

    bool cpu_supports(Isa isa);

    // Active table; defaults to the best supported ISA, overridable for tests and benchmarks
    const KernelTable &active();
    Isa active_isa();
    void force_isa(Isa isa); // throws std::invalid_argument if the CPU lacks the ISA
    std::string_view isa_name(Isa isa);

    // Convenience wrappers over active()
    inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) { return active().dotc(a.data(), b.data(), a.size()); }
    inline double norm2(std::span<const cplx> a) { return active().norm2(a.data(), a.size()); }
}

#endif
