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

#include "hucya/mdsi.hpp"

#include <string>

namespace hucya
{
    MdsiMode parse_mdsi_mode(std::string_view text)
    {
        if (text == "as_printed")
            return MdsiMode::as_printed;
        if (text == "offset_corrected")
            return MdsiMode::offset_corrected;
        if (text == "disabled")
            return MdsiMode::disabled;
        throw std::invalid_argument("unknown mdsi mode '" + std::string(text) + "' (as_printed, offset_corrected, disabled)");
    }

    const char *mdsi_mode_name(MdsiMode mode)
    {
        switch (mode)
        {
        case MdsiMode::as_printed:
            return "as_printed";
        case MdsiMode::offset_corrected:
            return "offset_corrected";
        case MdsiMode::disabled:
            return "disabled";
        }
        return "unknown";
    }

    VirtualGeometry virtual_geometry(const ArrayConfig &config)
    {
        VirtualGeometry g;
        for (std::size_t m = 0; m < config.n_subcarriers(); ++m)
        {
            const double ratio = config.f0() / config.frequency(m);
            g.h_virtual.push_back(ratio * config.ring_spacing());
            g.r_virtual.push_back(ratio * config.radius());
        }
        return g;
    }

    SnapshotTensor reconstruct(const SnapshotTensor &in, const ArrayConfig &config, const BeamSelection &selection, MdsiMode mode)
    {
        if (in.label() != SpatialLabel::post_stage2)
            throw std::invalid_argument("reconstruct: expected stage-2 output");
        const std::size_t nq = config.n_modes(), nb = selection.n_beams(), n = nq * nb;
        if (in.spatial_dim() != n || in.n_subcarriers() != config.n_subcarriers())
            throw std::invalid_argument("reconstruct: tensor shape does not match (2P+1) N_B x M");
        if (mode == MdsiMode::disabled)
            return in;

        const double offset = mode == MdsiMode::offset_corrected ? 1.0 : 0.0;
        const std::size_t forward_limit = nq * (nb - 1);
        SnapshotTensor out(n, in.n_subcarriers(), in.n_snapshots(), SpatialLabel::post_stage2);

        for (std::size_t m = 0; m < in.n_subcarriers(); ++m)
        {
            const double ratio = config.f0() / config.frequency(m);
            const double a = ratio - offset, b = ratio - offset; // r_vi/r and h_vi/h coincide
            for (std::size_t t = 0; t < in.n_snapshots(); ++t)
            {
                const cplx *y = in.column(m, t);
                cplx *o = out.column(m, t);
                for (std::size_t i = 0; i < n; ++i)
                {
                    cplx dh = 0.0, dv = 0.0;
                    if (i < forward_limit)
                    {
                        dh = y[i + 1] - y[i];
                        dv = y[i + nq] - y[i];
                    }
                    else
                    {
                        if (i >= 1)
                            dh = y[i] - y[i - 1];
                        if (i >= nq)
                            dv = y[i] - y[i - nq];
                    }
                    o[i] = y[i] + a * dh + b * dv;
                }
            }
        }
        return out;
    }

    CVec ideal_reference(const ArrayConfig &config, const BeamSelection &selection, const std::vector<PathParams> &paths,
                         std::size_t m, cplx pilot)
    {
        const std::size_t nq = config.n_modes(), nb = selection.n_beams();
        const double fm = config.frequency(m);
        CVec out = CVec::Zero(Eigen::Index(nq * nb));
        for (const auto &p : paths)
        {
            const CVec av = dirichlet_response(config, config.f0(), p.elevation, selection.indices);
            const CVec ah = phase_mode_response(config, config.f0(), p.azimuth, p.elevation);
            const cplx w = p.gain * pilot * std::polar(1.0, -2.0 * kPi * fm * p.delay);
            for (std::size_t u = 0; u < nb; ++u)
                out.segment(Eigen::Index(u * nq), Eigen::Index(nq)) += (w * av[Eigen::Index(u)]) * ah;
        }
        return out;
    }
}
