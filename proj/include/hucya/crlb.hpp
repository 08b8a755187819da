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

#ifndef HUCYA_CRLB_HPP
#define HUCYA_CRLB_HPP

// Numerical Cramer-Rao bound for per-path (delay, elevation, azimuth) under the Gaussian observation model.
// The mean uses the scenario's nominal gains; every snapshot contributes the same information.

#include "hucya/hybrid_beamformer.hpp"

#include <vector>

namespace hucya
{
    enum class PipelinePoint
    {
        antenna,    // full array, white noise
        post_stage2 // after the hybrid front-end, noise whitened through (W^H W)^{-1}
    };

    const char *pipeline_point_name(PipelinePoint p);
    PipelinePoint parse_pipeline_point(std::string_view text);

    struct FisherOptions
    {
        bool delays = true;
        bool angles = true; // elevation and azimuth
        bool gains = true;  // Re and Im of each complex gain
        const BeamSelection *selection = nullptr; // required for post_stage2
        double relative_step = 1e-6;
    };

    struct FisherMatrix
    {
        RMat information;
        std::vector<std::string> names; // "tau0", "theta0", "phi0", "re_beta0", "im_beta0", ...
    };

    // FIM = (2/sigma^2) Re[sum_{m,t} (d mu/dp)^H C^{-1} (d mu/dp)], derivatives by central differences with one
    // Richardson extrapolation step. Parameters stacked per path in the order tau, theta, phi, Re beta, Im beta,
    // restricted to the enabled groups.
    FisherMatrix fisher_numeric(const ArrayConfig &config, const SimulationScenario &scenario, PipelinePoint point,
                                const FisherOptions &options = {});

    struct BoundReport
    {
        std::vector<double> delay;     // s, per path
        std::vector<double> elevation; // rad
        std::vector<double> azimuth;   // rad
        double snr_db = 0.0;
        double condition_number = 0.0; // of the Jacobi-equilibrated Fisher matrix
    };

    // Bounds from the inverse of the full Fisher matrix (gains marginalised as nuisance parameters).
    // Throws numerical_error when the equilibrated condition number reaches 1e12.
    BoundReport crlb(const ArrayConfig &config, const SimulationScenario &scenario, PipelinePoint point,
                     const BeamSelection *selection = nullptr);

    // 2-norm condition number of D^{-1/2} F D^{-1/2}, D = diag(F)
    double equilibrated_condition(const RMat &fisher);
}

#endif
