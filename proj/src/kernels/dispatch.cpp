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

#include <atomic>
#include <cstdlib>
#include <string>

namespace hucya::kernels
{
    bool avx2_compiled(); // avx2.cpp

    bool cpu_supports(Isa isa)
    {
        switch (isa)
        {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return avx2_compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        }
        return false;
    }

    namespace
    {
        Isa detect()
        {
            // HUCYA_ISA=scalar pins the reference path, e.g. when bisecting a numerical difference
            if (const char *env = std::getenv("HUCYA_ISA"); env != nullptr && std::string(env) == "scalar")
                return Isa::scalar;
            return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
        }

        std::atomic<Isa> &current()
        {
            static std::atomic<Isa> isa{detect()};
            return isa;
        }
    }

    const KernelTable &active()
    {
        return current().load(std::memory_order_relaxed) == Isa::avx2 ? avx2_table() : scalar_table();
    }

    Isa active_isa() { return current().load(std::memory_order_relaxed); }

    void force_isa(Isa isa)
    {
        if (!cpu_supports(isa))
            throw std::invalid_argument("force_isa: ISA not supported on this CPU");
        current().store(isa, std::memory_order_relaxed);
    }

    std::string_view isa_name(Isa isa)
    {
        return isa == Isa::avx2 ? "avx2" : "scalar";
    }
}
