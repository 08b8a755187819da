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

#ifndef HUCYA_HYBRID_BEAMFORMER_HPP
#define HUCYA_HYBRID_BEAMFORMER_HPP

#include "hucya/channel_sim.hpp"

#include <vector>

namespace hucya
{
    // Factored hybrid combiner W = G_PS * G_AC * W_BB
    struct BeamformerStage
    {
        CMat phase_shifters;   // G_PS
        RMat array_combiners;  // G_AC, entries in {0, 1}
        CMat baseband;         // W_BB
        CMat composite;        // W
        SpatialLabel input_label = SpatialLabel::antenna;
        SpatialLabel output_label = SpatialLabel::post_stage1;

        std::size_t rf_chain_count() const { return static_cast<std::size_t>(composite.cols()); }
    };

    // Wraps an arbitrary composite matrix (test doubles, custom front-ends)
    BeamformerStage make_stage(const CMat &composite, SpatialLabel input_label, SpatialLabel output_label);

    // Vertical DFT beamspace: W = (U_d (x) 1_{N_H}) / sqrt(N_V)
    BeamformerStage build_stage1(const ArrayConfig &config);

    // output(:, m, t) = W^H input(:, m, t); throws std::invalid_argument on dimension or label mismatch
    SnapshotTensor apply_stage(const BeamformerStage &stage, const SnapshotTensor &input);

    // gamma = (1/N_p) sum_l N_V * (W/f_c) * |f_c h cos(theta_l) / c|
    double dispersion_factor(const ArrayConfig &config, const std::vector<double> &elevations);
    double dispersion_factor_worst_case(const ArrayConfig &config);
    double dispersion_factor(std::size_t n_vertical, double fractional_bandwidth, double normalized_beam_angle);

    struct BeamSelection
    {
        std::vector<std::size_t> indices;                     // sorted, 1-based beam indices
        std::vector<std::vector<std::size_t>> per_subcarrier; // U_m in selection order
        double threshold = 0.9;
        double dispersion = 0.0;
        std::size_t n_padded = 0; // beams added to reach ceil(gamma * n_paths)

        std::size_t n_beams() const { return indices.size(); }
    };

    // Snapshot-averaged beam powers sigma^2_{m,i}, returned as N_V x M
    RMat beam_powers(const SnapshotTensor &stage1_output);

    // Greedy per-subcarrier selection until the cumulative power reaches eta * sigma_m^2, union over
    // subcarriers, then padding from the band-aggregate ranking up to max(ceil(gamma * n_paths_hint), min_beams).
    BeamSelection select_beams(const SnapshotTensor &stage1_output, double eta, double gamma, std::size_t n_paths_hint,
                               std::size_t min_beams = 2);

    // Selection with explicit indices (tests, fixed front-ends)
    BeamSelection fixed_selection(std::vector<std::size_t> indices);

    // Phase-mode reduction on the selected beams: G_PS = U_d (x) U_sH, G_AC = J_B (x) I_{2P+1},
    // W_BB = sqrt(N_V/N_H) I. Output index = (u-1)(2P+1) + (p+P), beam-major.
    BeamformerStage build_stage2(const ArrayConfig &config, const BeamSelection &selection);

    // Beam-selection matrix J_B (N_V x N_B)
    RMat beam_selection_matrix(std::size_t n_vertical, const std::vector<std::size_t> &indices);
}

#endif
