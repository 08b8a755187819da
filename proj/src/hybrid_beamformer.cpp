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

#include "hucya/hybrid_beamformer.hpp"
#include "hucya/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace hucya
{
    namespace
    {
        CMat kron(const CMat &a, const CMat &b)
        {
            CMat out(a.rows() * b.rows(), a.cols() * b.cols());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < a.cols(); ++j)
                    out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            return out;
        }

        RMat kron(const RMat &a, const RMat &b)
        {
            RMat out(a.rows() * b.rows(), a.cols() * b.cols());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < a.cols(); ++j)
                    out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            return out;
        }
    }

    BeamformerStage make_stage(const CMat &composite, SpatialLabel input_label, SpatialLabel output_label)
    {
        BeamformerStage s;
        s.phase_shifters = composite;
        s.array_combiners = RMat::Identity(composite.cols(), composite.cols());
        s.baseband = CMat::Identity(composite.cols(), composite.cols());
        s.composite = composite;
        s.input_label = input_label;
        s.output_label = output_label;
        return s;
    }

    BeamformerStage build_stage1(const ArrayConfig &config)
    {
        const auto nv = Eigen::Index(config.n_vertical()), nh = Eigen::Index(config.n_horizontal());
        BeamformerStage s;
        s.phase_shifters = kron(vertical_dft_matrix(config.n_vertical()), CMat::Identity(nh, nh));
        s.array_combiners = kron(RMat(RMat::Identity(nv, nv)), RMat(RMat::Ones(nh, 1)));
        s.baseband = CMat::Identity(nv, nv) / std::sqrt(double(nv));
        s.composite = s.phase_shifters * s.array_combiners.cast<cplx>() * s.baseband;
        s.input_label = SpatialLabel::antenna;
        s.output_label = SpatialLabel::post_stage1;
        return s;
    }

    SnapshotTensor apply_stage(const BeamformerStage &stage, const SnapshotTensor &input)
    {
        if (input.label() != stage.input_label)
            throw std::invalid_argument(std::string("apply_stage: expected ") + label_name(stage.input_label) +
                                        " input, got " + label_name(input.label()));
        const std::size_t rows = std::size_t(stage.composite.rows()), cols = std::size_t(stage.composite.cols());
        if (input.spatial_dim() != rows)
            throw std::invalid_argument("apply_stage: input spatial dimension does not match the combiner");

        SnapshotTensor out(cols, input.n_subcarriers(), input.n_snapshots(), stage.output_label);
        const auto &k = kernels::active();
        const cplx *w = stage.composite.data();
        for (std::size_t t = 0; t < input.n_snapshots(); ++t)
            for (std::size_t m = 0; m < input.n_subcarriers(); ++m)
                k.gemv_h(w, rows, cols, input.column(m, t), out.column(m, t));
        return out;
    }

    double dispersion_factor(std::size_t n_vertical, double fractional_bandwidth, double normalized_beam_angle)
    {
        return static_cast<double>(n_vertical) * fractional_bandwidth * std::abs(normalized_beam_angle);
    }

    double dispersion_factor(const ArrayConfig &config, const std::vector<double> &elevations)
    {
        if (elevations.empty())
            throw std::invalid_argument("dispersion_factor: no elevations given");
        const double fc = config.center_frequency();
        const double alpha = config.bandwidth() / fc;
        double g = 0.0;
        for (double th : elevations)
            g += dispersion_factor(config.n_vertical(), alpha, fc * config.ring_spacing() * std::cos(th) / kSpeedOfLight);
        return g / static_cast<double>(elevations.size());
    }

    double dispersion_factor_worst_case(const ArrayConfig &config)
    {
        const double fc = config.center_frequency();
        return dispersion_factor(config.n_vertical(), config.bandwidth() / fc, fc * config.ring_spacing() / kSpeedOfLight);
    }

    RMat beam_powers(const SnapshotTensor &y)
    {
        if (y.label() != SpatialLabel::post_stage1)
            throw std::invalid_argument("beam_powers: expected stage-1 output");
        const auto nv = Eigen::Index(y.spatial_dim()), nm = Eigen::Index(y.n_subcarriers());
        RMat p = RMat::Zero(nv, nm);
        for (std::size_t t = 0; t < y.n_snapshots(); ++t)
            for (Eigen::Index m = 0; m < nm; ++m)
            {
                const cplx *col = y.column(std::size_t(m), t);
                for (Eigen::Index i = 0; i < nv; ++i)
                    p(i, m) += std::norm(col[i]);
            }
        return p / static_cast<double>(y.n_snapshots());
    }

    BeamSelection select_beams(const SnapshotTensor &stage1_output, double eta, double gamma, std::size_t n_paths_hint,
                               std::size_t min_beams)
    {
        if (!(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("select_beams: threshold must lie in (0, 1]");
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("select_beams: dispersion factor must be finite and non-negative");

        const RMat p = beam_powers(stage1_output);
        const std::size_t nv = std::size_t(p.rows()), nm = std::size_t(p.cols());

        BeamSelection sel;
        sel.threshold = eta;
        sel.dispersion = gamma;
        sel.per_subcarrier.resize(nm);
        std::vector<bool> in_union(nv, false);

        std::vector<std::size_t> order(nv);
        for (std::size_t m = 0; m < nm; ++m)
        {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                             { return p(Eigen::Index(a), Eigen::Index(m)) > p(Eigen::Index(b), Eigen::Index(m)); });
            const double total = p.col(Eigen::Index(m)).sum();
            double acc = 0.0;
            for (std::size_t k = 0; k < nv && (acc < eta * total || sel.per_subcarrier[m].empty()); ++k)
            {
                acc += p(Eigen::Index(order[k]), Eigen::Index(m));
                sel.per_subcarrier[m].push_back(order[k] + 1);
                in_union[order[k]] = true;
            }
        }

        std::size_t count = std::size_t(std::count(in_union.begin(), in_union.end(), true));
        const auto target = std::min<std::size_t>(
            nv, std::max<std::size_t>(min_beams, static_cast<std::size_t>(std::ceil(gamma * double(n_paths_hint) - 1e-9))));
        if (count < target)
        {
            const RVec agg = p.rowwise().sum();
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                             { return agg[Eigen::Index(a)] > agg[Eigen::Index(b)]; });
            for (std::size_t k = 0; k < nv && count < target; ++k)
                if (!in_union[order[k]])
                {
                    in_union[order[k]] = true;
                    ++count, ++sel.n_padded;
                }
        }

        for (std::size_t i = 0; i < nv; ++i)
            if (in_union[i])
                sel.indices.push_back(i + 1);
        return sel;
    }

    BeamSelection fixed_selection(std::vector<std::size_t> indices)
    {
        std::sort(indices.begin(), indices.end());
        if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
            throw std::invalid_argument("fixed_selection: duplicate beam index");
        BeamSelection sel;
        sel.indices = std::move(indices);
        sel.threshold = 1.0;
        return sel;
    }

    RMat beam_selection_matrix(std::size_t n_vertical, const std::vector<std::size_t> &indices)
    {
        RMat jb = RMat::Zero(Eigen::Index(n_vertical), Eigen::Index(indices.size()));
        for (std::size_t u = 0; u < indices.size(); ++u)
        {
            if (indices[u] < 1 || indices[u] > n_vertical)
                throw std::out_of_range("beam index outside [1, N_V]");
            jb(Eigen::Index(indices[u] - 1), Eigen::Index(u)) = 1.0;
        }
        return jb;
    }

    BeamformerStage build_stage2(const ArrayConfig &config, const BeamSelection &selection)
    {
        if (selection.indices.empty())
            throw std::invalid_argument("build_stage2: empty beam selection");
        const std::size_t nv = config.n_vertical(), nh = config.n_horizontal();
        const auto nq = Eigen::Index(config.n_modes()), nb = Eigen::Index(selection.n_beams());

        BeamformerStage s;
        s.phase_shifters = kron(vertical_dft_matrix(nv), qdft_matrix(nh, config.highest_order()));
        s.array_combiners = kron(beam_selection_matrix(nv, selection.indices), RMat::Identity(nq, nq));
        s.baseband = CMat::Identity(nq * nb, nq * nb) * std::sqrt(double(nv) / double(nh));
        s.composite = s.phase_shifters * s.array_combiners.cast<cplx>() * s.baseband;
        s.input_label = SpatialLabel::antenna;
        s.output_label = SpatialLabel::post_stage2;
        return s;
    }
}
