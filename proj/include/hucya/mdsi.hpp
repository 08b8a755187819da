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

#ifndef HUCYA_MDSI_HPP
#define HUCYA_MDSI_HPP

#include "hucya/hybrid_beamformer.hpp"

#include <string_view>
#include <vector>

namespace hucya
{
    // Multidimensional spatial interpolation of stage-2 outputs towards the reference-frequency manifold.
    //   as_printed:        out = y + (r_vi/r) dH + (h_vi/h) dV
    //   offset_corrected:  out = y + (r_vi/r - 1) dH + (h_vi/h - 1) dV
    //   disabled:          out = y
    enum class MdsiMode
    {
        as_printed,
        offset_corrected,
        disabled
    };

    MdsiMode parse_mdsi_mode(std::string_view text); // throws std::invalid_argument
    const char *mdsi_mode_name(MdsiMode mode);

    struct VirtualGeometry
    {
        std::vector<double> h_virtual; // f0 h / f_m
        std::vector<double> r_virtual; // f0 r / f_m
    };

    VirtualGeometry virtual_geometry(const ArrayConfig &config);

    // Neighbour differences use forward stencils for 0-based index i < (2P+1)(N_B-1) and backward
    // stencils otherwise; a neighbour outside the vector contributes a zero difference.
    SnapshotTensor reconstruct(const SnapshotTensor &stage2_output, const ArrayConfig &config, const BeamSelection &selection,
                               MdsiMode mode = MdsiMode::offset_corrected);

    // Squint-free target sum_l beta_l x e^{-j 2 pi f_m tau_l} (a~_V0 (x) a~_H0), for noiseless comparisons
    CVec ideal_reference(const ArrayConfig &config, const BeamSelection &selection, const std::vector<PathParams> &paths,
                         std::size_t m, cplx pilot = 1.0);
}

#endif
